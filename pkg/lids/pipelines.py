"""
Pipeline abstraction: one script + metadata -> PipelineGraphIR -> named graph.

The abstraction runs in three passes over a script:

1. static analysis (``ast``): statements in execution order, code flow,
   data flow, control-flow context and the qualified path of every call,
   resolved through imports and a forward type tracker seeded with
   documented return types;
2. documentation analysis: ``enrich_statement`` names positional arguments,
   appends documented defaults and fills the return type;
3. dataset usage: ``detect_dataset_usage`` predicts table and column reads.
"""
import ast
import builtins
import json
import logging
from dataclasses import asdict, dataclass, field, replace
from pathlib import PurePosixPath

from rdflib import Literal
from rdflib.namespace import RDF, RDFS

from .exceptions import PipelineParseError
from .library_docs import resolve_call
from .vocabulary import (
    CALLS_LIBRARY, HAS_AUTHOR, HAS_DATA_FLOW_TO, HAS_DATASET, HAS_NEXT_STATEMENT,
    HAS_PARAMETER, HAS_SCORE, HAS_TAG, HAS_TEXT, HAS_URL, IN_CONTROL_FLOW, Classes,
    dataset_uri, library_uri, pipeline_uri, statement_uri,
)

logger = logging.getLogger(__name__)

CONTROL_FLOW_TYPES = ("loop", "conditional", "import", "user_function")

DEFAULT_INSIGNIFICANT_CALLS = ("print", "head", "tail", "info", "describe", "summary", "display", "show")
DEFAULT_READ_CALLS = ("read_csv", "read_json", "read_parquet")
_PATH_KEYWORDS = ("filepath_or_buffer", "path_or_buf", "path")
_BUILTINS = frozenset(dir(builtins))


@dataclass(frozen=True)
class PipelineMetadata:
    pipeline_id: str
    source: str
    dataset_name: str
    author: str = ""
    score: float = 0.0
    tags: tuple[str, ...] = ()
    url: str | None = None

    @classmethod
    def from_dict(cls, data):
        return cls(
            pipeline_id=data["pipeline_id"],
            source=data["source"],
            dataset_name=data["dataset_name"],
            author=data.get("author") or "",
            score=float(data.get("score") or 0.0),
            tags=tuple(data.get("tags") or ()),
            url=data.get("url"),
        )


@dataclass(frozen=True)
class StatementNode:
    index: int
    line: int
    text: str
    control_flow: tuple[str, ...] = ()
    call: str | None = None
    parameters: tuple[tuple[str, str], ...] = ()
    return_type: str | None = None
    detected_table_reads: tuple[str, ...] = ()
    detected_column_reads: tuple[str, ...] = ()
    # call-site arguments as written; ("**", text) marks a **mapping argument
    arguments: tuple[str, ...] = ()
    keywords: tuple[tuple[str, str], ...] = ()
    # (inferred type of the indexed value, string key) for literal subscripts
    subscripts: tuple[tuple[str | None, str], ...] = ()

    @classmethod
    def from_dict(cls, data):
        return cls(
            index=data["index"],
            line=data["line"],
            text=data["text"],
            control_flow=tuple(data.get("control_flow") or ()),
            call=data.get("call"),
            parameters=tuple(tuple(p) for p in data.get("parameters") or ()),
            return_type=data.get("return_type"),
            detected_table_reads=tuple(data.get("detected_table_reads") or ()),
            detected_column_reads=tuple(data.get("detected_column_reads") or ()),
            arguments=tuple(data.get("arguments") or ()),
            keywords=tuple(tuple(k) for k in data.get("keywords") or ()),
            subscripts=tuple(tuple(s) for s in data.get("subscripts") or ()),
        )


@dataclass(frozen=True)
class PipelineGraphIR:
    metadata: PipelineMetadata
    statements: tuple[StatementNode, ...] = ()
    data_flow_edges: tuple[tuple[int, int], ...] = ()

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, data):
        return cls(
            metadata=PipelineMetadata.from_dict(data["metadata"]),
            statements=tuple(StatementNode.from_dict(s) for s in data["statements"]),
            data_flow_edges=tuple(sorted(tuple(e) for e in data.get("data_flow_edges") or ())),
        )


def dump_ir(ir, path):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(ir.to_dict(), indent=1, sort_keys=True), encoding="utf-8")


# ---------------------------------------------------------------------------
# static analysis
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _Module:
    path: str


@dataclass(frozen=True)
class _Value:
    type_path: str | None


@dataclass(frozen=True)
class _UserCallable:
    name: str


@dataclass
class _Draft:
    """A statement under construction."""

    line: int
    text: str
    control_flow: frozenset
    call: str | None = None
    arguments: tuple = ()
    keywords: tuple = ()
    subscripts: list = field(default_factory=list)
    uses: list = field(default_factory=list)
    defines: list = field(default_factory=list)
    is_import: bool = False


def _written_parameters(arguments, keywords, documented_names=()):
    """(name, text) pairs for call-site arguments, in call order."""
    parameters = []
    positional = True
    for position, text in enumerate(arguments):
        name = documented_names[position] if positional and position < len(documented_names) else None
        # a starred argument or a documented *args parameter ends positional mapping
        if text.startswith("*") or (name or "").startswith("*"):
            positional = False
            name = None
        parameters.append((name or f"vararg_{position}", text))
    extra = len(arguments)
    for name, text in keywords:
        if name == "**":
            parameters.append((f"vararg_{extra}", text))
            extra += 1
        else:
            parameters.append((name, text))
    return parameters


def _terminal_name(func):
    if isinstance(func, ast.Name):
        return func.id
    if isinstance(func, ast.Attribute):
        return func.attr
    return None


def _calls_in_evaluation_order(exprs):
    """Call nodes under ``exprs``, inner calls before the calls consuming them."""
    ordered = []

    def visit(node):
        if isinstance(node, ast.Call):
            visit(node.func)
            for arg in node.args:
                visit(arg)
            for keyword in node.keywords:
                visit(keyword.value)
            ordered.append(node)
            return
        if isinstance(node, (ast.FunctionDef, ast.AsyncFunctionDef, ast.ClassDef)):
            return
        for child in ast.iter_child_nodes(node):
            visit(child)

    for expr in exprs:
        if expr is not None:
            visit(expr)
    return ordered


def _target_names(target):
    if isinstance(target, ast.Name):
        return [target.id]
    if isinstance(target, (ast.Tuple, ast.List)):
        return [name for element in target.elts for name in _target_names(element)]
    if isinstance(target, ast.Starred):
        return _target_names(target.value)
    return []


def _updated_base(target):
    """``df['a'] = ...`` / ``obj.attr = ...`` update the variable ``df`` / ``obj``."""
    while isinstance(target, (ast.Subscript, ast.Attribute)):
        target = target.value
    return target.id if isinstance(target, ast.Name) else None


def _string_keys(node):
    if isinstance(node, ast.Constant) and isinstance(node.value, str):
        return [node.value]
    if isinstance(node, (ast.List, ast.Tuple)):
        keys = [e.value for e in node.elts if isinstance(e, ast.Constant) and isinstance(e.value, str)]
        if len(keys) == len(node.elts):
            return keys
    return []


class _StaticAnalyzer:
    def __init__(self, source, doc_index, insignificant_calls):
        self.source = source
        self.lines = source.splitlines()
        self.doc_index = doc_index
        self.insignificant = frozenset(insignificant_calls)
        self.symbols: dict = {}
        self.drafts: list[_Draft] = []
        self.edges: set = set()
        self.last_definition: dict[str, int] = {}
        self.call_types: dict[int, str | None] = {}
        self.current_line = 0

    # -- symbols and types ---------------------------------------------------

    def _module_path(self, expr):
        if isinstance(expr, ast.Name):
            symbol = self.symbols.get(expr.id)
            return symbol.path if isinstance(symbol, _Module) else None
        if isinstance(expr, ast.Attribute):
            base = self._module_path(expr.value)
            return f"{base}.{expr.attr}" if base else None
        return None

    def _resolve(self, func):
        """Qualified path of a callee, or None for user code and unknowns."""
        if isinstance(func, ast.Name):
            symbol = self.symbols.get(func.id)
            if isinstance(symbol, _Module):
                return symbol.path
            if symbol is None and func.id in _BUILTINS:
                return f"builtins.{func.id}"
            return None
        if isinstance(func, ast.Attribute):
            base = self._module_path(func.value)
            if base:
                return f"{base}.{func.attr}"
            type_path = self._type_of(func.value)
            if type_path:
                return f"{type_path}.{func.attr}"
        return None

    def _return_type(self, path):
        signature = resolve_call(self.doc_index, path) if path else None
        if signature is None:
            return None
        if signature.return_type:
            return signature.return_type
        return signature.qualified_path if signature.is_class else None

    def _type_of(self, expr):
        if isinstance(expr, ast.Name):
            symbol = self.symbols.get(expr.id)
            return symbol.type_path if isinstance(symbol, _Value) else None
        if isinstance(expr, ast.Call):
            if id(expr) not in self.call_types:
                self.call_types[id(expr)] = self._return_type(self._resolve(expr.func))
            return self.call_types[id(expr)]
        if isinstance(expr, ast.Subscript):
            base = self._type_of(expr.value)
            if base and base.endswith("DataFrame"):
                key = expr.slice
                if isinstance(key, ast.Constant) and isinstance(key.value, str):
                    return "pandas.Series"
                return base
            return None
        if isinstance(expr, ast.BinOp):
            return self._type_of(expr.left) or self._type_of(expr.right)
        return None

    # -- statement construction ------------------------------------------------

    def _segment(self, node):
        return ast.get_source_segment(self.source, node) or self.lines[node.lineno - 1].strip()

    def _header(self, stmt):
        return self.lines[stmt.lineno - 1].strip()

    def _collect(self, region, skip):
        """Names read and literal subscripts inside ``region``, minus ``skip`` subtrees."""
        uses, subscripts = [], []

        def visit(node):
            if id(node) in skip:
                return
            if isinstance(node, ast.Name) and isinstance(node.ctx, ast.Load):
                uses.append(node.id)
            if isinstance(node, ast.Subscript):
                value_type = self._type_of(node.value)
                for key in _string_keys(node.slice):
                    subscripts.append((value_type, key))
            for child in ast.iter_child_nodes(node):
                visit(child)

        for node in region:
            if node is not None:
                visit(node)
        return uses, subscripts

    def _emit(self, draft):
        index = len(self.drafts)
        for name in dict.fromkeys(draft.uses):
            if name in self.last_definition:
                self.edges.add((self.last_definition[name], index))
        for name in draft.defines:
            self.last_definition[name] = index
        self.drafts.append(draft)
        return index

    def _statement(self, stmt, context, exprs, *, defines=(), updates=(), text=None,
                   region=None, anchor_without_call=False):
        """Emit the call statements of one source statement plus its anchor."""
        calls = _calls_in_evaluation_order(exprs)
        kept = []
        for call in calls:
            path = self._resolve(call.func)
            self.call_types[id(call)] = self._return_type(path)
            name = path.rsplit(".", 1)[-1] if path else _terminal_name(call.func)
            if name in self.insignificant:
                continue
            kept.append((call, path))
        kept_ids = {id(call) for call, _ in kept}

        parents = {}
        for expr in exprs:
            if expr is not None:
                for parent in ast.walk(expr):
                    for child in ast.iter_child_nodes(parent):
                        parents[id(child)] = parent

        def enclosing(call):
            node = parents.get(id(call))
            while node is not None and id(node) not in kept_ids:
                node = parents.get(id(node))
            return node

        region = list(exprs) if region is None else region
        has_anchor = bool(defines or updates or anchor_without_call)
        indices = {}
        for position, (call, path) in enumerate(kept):
            is_anchor = position == len(kept) - 1 and (has_anchor or enclosing(call) is None)
            nested = kept_ids - {id(call)}
            if is_anchor:
                uses, subscripts = self._collect(region, nested)
                node_text = text or self._segment(stmt)
                line = stmt.lineno
            else:
                uses, subscripts = self._collect([call], nested)
                node_text = self._segment(call)
                line = call.lineno
            arguments = tuple(self._segment(arg) for arg in call.args)
            keywords = tuple(
                (kw.arg, self._segment(kw.value)) if kw.arg else ("**", "**" + self._segment(kw.value))
                for kw in call.keywords
            )
            draft = _Draft(
                line=line,
                text=node_text,
                control_flow=context,
                call=path,
                arguments=arguments,
                keywords=keywords,
                subscripts=subscripts,
                uses=uses + list(updates) if is_anchor else uses,
                defines=list(defines) + list(updates) if is_anchor else [],
            )
            indices[id(call)] = self._emit(draft)

        # inner call -> the call (or statement) consuming its result
        last_index = indices[id(kept[-1][0])] if kept else None
        for call, _ in kept:
            outer = enclosing(call)
            target = indices.get(id(outer)) if outer is not None else last_index
            if target is not None and target != indices[id(call)]:
                self.edges.add((indices[id(call)], target))

        if not kept and has_anchor:
            uses, subscripts = self._collect(region, set())
            self._emit(_Draft(
                line=stmt.lineno,
                text=text or self._segment(stmt),
                control_flow=context,
                subscripts=subscripts,
                uses=uses + list(updates),
                defines=list(defines) + list(updates),
            ))

    def _bind_targets(self, targets, value):
        names = []
        for target in targets:
            target_names = _target_names(target)
            names.extend(target_names)
            if isinstance(target, ast.Name):
                self.symbols[target.id] = _Value(self._type_of(value) if value is not None else None)
            else:
                for name in target_names:
                    self.symbols[name] = _Value(None)
        return names

    def _import(self, stmt, context):
        context = context | {"import"}
        for alias in stmt.names:
            if isinstance(stmt, ast.ImportFrom):
                if stmt.level or not stmt.module:
                    continue
                path = stmt.module if alias.name == "*" else f"{stmt.module}.{alias.name}"
                bound = None if alias.name == "*" else alias.asname or alias.name
                bound_path = path
            else:
                path = alias.name
                bound = alias.asname or alias.name.split(".")[0]
                bound_path = alias.name if alias.asname else bound
            draft = _Draft(
                line=stmt.lineno,
                text=self._segment(stmt),
                control_flow=context,
                call=path,
                defines=[bound] if bound else [],
                is_import=True,
            )
            self._emit(draft)
            if bound:
                self.symbols[bound] = _Module(bound_path)

    def block(self, body, context):
        for stmt in body:
            self.current_line = stmt.lineno
            self.visit(stmt, context)

    def visit(self, stmt, context):
        if isinstance(stmt, (ast.Import, ast.ImportFrom)):
            self._import(stmt, context)
        elif isinstance(stmt, (ast.FunctionDef, ast.AsyncFunctionDef, ast.ClassDef)):
            self._scoped(stmt, context)
        elif isinstance(stmt, ast.Assign):
            self._statement(stmt, context, [stmt.value, *stmt.targets],
                            defines=self._defined_by(stmt.targets),
                            updates=self._updated_by(stmt.targets))
            self._bind_targets(stmt.targets, stmt.value)
        elif isinstance(stmt, ast.AnnAssign):
            targets = [stmt.target]
            self._statement(stmt, context, [stmt.value, stmt.target],
                            defines=self._defined_by(targets) if stmt.value is not None else (),
                            updates=self._updated_by(targets))
            if stmt.value is not None:
                self._bind_targets(targets, stmt.value)
        elif isinstance(stmt, ast.AugAssign):
            names = _target_names(stmt.target)
            base = _updated_base(stmt.target)
            self._statement(stmt, context, [stmt.value, stmt.target],
                            updates=names or ([base] if base else []))
        elif isinstance(stmt, ast.Expr):
            updates = ()
            value = stmt.value
            if (isinstance(value, ast.Call) and isinstance(value.func, ast.Attribute)
                    and value.func.attr not in self.insignificant):
                base = value.func.value
                if isinstance(base, ast.Name) and not isinstance(self.symbols.get(base.id), _Module):
                    updates = (base.id,)
            self._statement(stmt, context, [value], updates=updates)
        elif isinstance(stmt, (ast.For, ast.AsyncFor)):
            loop = context | {"loop"}
            names = _target_names(stmt.target)
            self._statement(stmt, loop, [stmt.iter], defines=names, text=self._header(stmt),
                            region=[stmt.iter, stmt.target])
            self._bind_targets([stmt.target], None)
            self.block(stmt.body, loop)
            self.block(stmt.orelse, loop)
        elif isinstance(stmt, ast.While):
            loop = context | {"loop"}
            self._statement(stmt, loop, [stmt.test], text=self._header(stmt))
            self.block(stmt.body, loop)
            self.block(stmt.orelse, loop)
        elif isinstance(stmt, ast.If):
            conditional = context | {"conditional"}
            self._statement(stmt, conditional, [stmt.test], text=self._header(stmt))
            self.block(stmt.body, conditional)
            self.block(stmt.orelse, conditional)
        elif isinstance(stmt, (ast.With, ast.AsyncWith)):
            exprs = [item.context_expr for item in stmt.items]
            names = [n for item in stmt.items if item.optional_vars for n in _target_names(item.optional_vars)]
            self._statement(stmt, context, exprs, defines=names, text=self._header(stmt),
                            region=exprs)
            for item in stmt.items:
                if item.optional_vars is not None:
                    self._bind_targets([item.optional_vars], item.context_expr)
            self.block(stmt.body, context)
        elif isinstance(stmt, ast.Try) or type(stmt).__name__ == "TryStar":
            self.block(stmt.body, context)
            for handler in stmt.handlers:
                if handler.name:
                    self.symbols[handler.name] = _Value(None)
                self.block(handler.body, context)
            self.block(stmt.orelse, context)
            self.block(stmt.finalbody, context)
        elif isinstance(stmt, ast.Match):
            conditional = context | {"conditional"}
            self._statement(stmt, conditional, [stmt.subject], text=self._header(stmt))
            for case in stmt.cases:
                self.block(case.body, conditional)
        elif isinstance(stmt, (ast.Return, ast.Raise, ast.Assert, ast.Delete)):
            exprs = [getattr(stmt, name, None) for name in ("value", "exc", "test")]
            self._statement(stmt, context, [e for e in exprs if e is not None])

    def _defined_by(self, targets):
        return [name for target in targets for name in _target_names(target)]

    def _updated_by(self, targets):
        bases = []
        for target in targets:
            if isinstance(target, (ast.Subscript, ast.Attribute)):
                base = _updated_base(target)
                if base:
                    bases.append(base)
        return bases

    def _scoped(self, stmt, context):
        """User-defined functions and classes, abstracted once at the definition site."""
        symbols = dict(self.symbols)
        definitions = dict(self.last_definition)
        if not isinstance(stmt, ast.ClassDef):
            for arg in stmt.args.posonlyargs + stmt.args.args + stmt.args.kwonlyargs:
                self.symbols[arg.arg] = _Value(None)
                self.last_definition.pop(arg.arg, None)
        self.block(stmt.body, context | {"user_function"})
        self.symbols = symbols
        self.last_definition = definitions
        self.symbols[stmt.name] = _UserCallable(stmt.name)


def enrich_statement(stmt, doc_index):
    """Name positional arguments, append documented defaults, fill the return type."""
    if stmt.call is None or "import" in stmt.control_flow:
        return stmt
    signature = resolve_call(doc_index, stmt.call)
    if signature is None:
        return stmt
    parameters = _written_parameters(stmt.arguments, stmt.keywords, signature.parameter_names)
    written = {name for name, _ in parameters}
    for parameter in signature.parameters:
        if parameter.name not in written and parameter.default_value is not None:
            parameters.append((parameter.name, parameter.default_value))
    return_type = signature.return_type or (signature.qualified_path if signature.is_class else None)
    return replace(stmt, parameters=tuple(parameters), return_type=return_type)


def _literal_string(text):
    try:
        value = ast.literal_eval(text)
    except (ValueError, SyntaxError):
        return None
    return value if isinstance(value, str) else None


def detect_dataset_usage(stmt, read_calls=DEFAULT_READ_CALLS):
    """Predicted (table_reads, column_reads) of one enriched statement."""
    tables = []
    if stmt.call and "import" not in stmt.control_flow:
        owner, _, name = stmt.call.rpartition(".")
        if name in read_calls and owner.endswith("pandas"):
            candidates = list(stmt.arguments[:1])
            candidates += [text for key, text in stmt.keywords if key in _PATH_KEYWORDS]
            for text in candidates:
                value = _literal_string(text)
                if value:
                    tables.append(PurePosixPath(value.replace("\\", "/")).name)
                    break
    columns = [key for value_type, key in stmt.subscripts if value_type and value_type.endswith("DataFrame")]
    return tuple(dict.fromkeys(tables)), tuple(dict.fromkeys(columns))


def abstract_pipeline(script_text, metadata, doc_index,
                      insignificant_calls=DEFAULT_INSIGNIFICANT_CALLS, read_calls=DEFAULT_READ_CALLS):
    try:
        tree = ast.parse(script_text)
    except SyntaxError as exc:
        raise PipelineParseError(metadata.pipeline_id, exc.lineno or 0, exc.msg) from exc
    except ValueError as exc:
        raise PipelineParseError(metadata.pipeline_id, 0, str(exc)) from exc
    except (RecursionError, MemoryError) as exc:
        raise PipelineParseError(metadata.pipeline_id, 0, "script nests too deeply") from exc

    analyzer = _StaticAnalyzer(script_text, doc_index, insignificant_calls)
    try:
        analyzer.block(tree.body, frozenset())
    except (RecursionError, MemoryError) as exc:
        raise PipelineParseError(metadata.pipeline_id, analyzer.current_line, "script nests too deeply") from exc

    statements = []
    for index, draft in enumerate(analyzer.drafts):
        statement = StatementNode(
            index=index,
            line=draft.line,
            text=draft.text,
            control_flow=tuple(sorted(draft.control_flow)),
            call=draft.call,
            parameters=() if draft.is_import or draft.call is None
            else tuple(_written_parameters(draft.arguments, draft.keywords)),
            arguments=draft.arguments,
            keywords=draft.keywords,
            subscripts=tuple(dict.fromkeys(draft.subscripts)),
        )
        statement = enrich_statement(statement, doc_index)
        table_reads, column_reads = detect_dataset_usage(statement, read_calls)
        statements.append(replace(statement, detected_table_reads=table_reads,
                                  detected_column_reads=column_reads))
    edges = tuple(sorted(edge for edge in analyzer.edges if edge[0] < edge[1]))
    logger.debug("abstracted %s: %d statements, %d data-flow edges",
                 metadata.pipeline_id, len(statements), len(edges))
    return PipelineGraphIR(metadata=metadata, statements=tuple(statements), data_flow_edges=edges)


# ---------------------------------------------------------------------------
# named graph
# ---------------------------------------------------------------------------


def pipeline_graph_name(metadata):
    return pipeline_uri(metadata.source, metadata.dataset_name, metadata.pipeline_id)


def emit_pipeline_graph(ir):
    """(graph name, triples) of one abstracted pipeline."""
    meta = ir.metadata
    graph = pipeline_graph_name(meta)
    triples = [
        (graph, RDF.type, Classes.PIPELINE),
        (graph, RDFS.label, Literal(meta.pipeline_id)),
        (graph, HAS_DATASET, dataset_uri(meta.source, meta.dataset_name)),
        (graph, HAS_AUTHOR, Literal(meta.author)),
        (graph, HAS_SCORE, Literal(float(meta.score))),
    ]
    triples += [(graph, HAS_TAG, Literal(tag)) for tag in meta.tags]
    if meta.url:
        triples.append((graph, HAS_URL, Literal(meta.url)))

    def node(index):
        return statement_uri(meta.source, meta.dataset_name, meta.pipeline_id, index)

    for statement in ir.statements:
        subject = node(statement.index)
        triples.append((subject, RDF.type, Classes.STATEMENT))
        triples.append((subject, RDFS.label, Literal(str(statement.index))))
        triples.append((subject, HAS_TEXT, Literal(statement.text)))
        if statement.index + 1 < len(ir.statements):
            triples.append((subject, HAS_NEXT_STATEMENT, node(statement.index + 1)))
        if statement.call:
            triples.append((subject, CALLS_LIBRARY, library_uri(statement.call)))
        for name, value in statement.parameters:
            triples.append((subject, HAS_PARAMETER, Literal(f"{name}={value}")))
        for flow in statement.control_flow:
            triples.append((subject, IN_CONTROL_FLOW, Literal(flow)))
    for source, target in ir.data_flow_edges:
        triples.append((node(source), HAS_DATA_FLOW_TO, node(target)))
    return graph, triples


def called_paths(irs):
    return sorted({s.call for ir in irs for s in ir.statements if s.call})
