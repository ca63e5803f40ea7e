"""
TriG-star reading and writing for GraphStore.

Layout of a written document::

    @prefix kglids: <http://kglids.org/ontology/> .
    ...
    <s> <p> <o> .
    << <s> <p> <o> >> kglids:certainty "0.95"^^xsd:double .

    <graph> {
    <s> <p> <o> .
    }

Default-graph triples come first at top level, then one block per named graph,
all in match order. Every triple and every certainty annotation occupies
exactly one line; the annotation follows its triple.
"""
import logging
import re

from rdflib import Dataset, Graph, URIRef
from rdflib.graph import DATASET_DEFAULT_GRAPH_ID
from rdflib.namespace import XSD

from .exceptions import CorpusIoError, TrigSyntaxError
from .graph import DEFAULT_GRAPH, GraphStore
from .vocabulary import CERTAINTY, PREFIXES

logger = logging.getLogger(__name__)

_LOCAL_NAME = re.compile(r"^[A-Za-z_][A-Za-z0-9_\-]*$")
_ANNOTATION = re.compile(
    r'^<<\s*(?P<triple>.+)\s*>>\s+(?P<predicate>\S+)\s+"(?P<value>[^"]*)"\^\^(?P<datatype>\S+)\s*\.$'
)
_GRAPH_OPEN = re.compile(r"^(?P<graph>\S+)\s*\{$")
_GRAPH_CLOSE = re.compile(r"^\}$")
_ESCAPES = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\r": "\\r", "\t": "\\t"}
# Raw line boundaries would split a literal across lines on re-read.
_LINE_BREAKS = frozenset("\x0b\x0c\x1c\x1d\x1e\x85\u2028\u2029")
_DATATYPE_NAMES = {XSD.integer: "xsd:integer", XSD.double: "xsd:double", XSD.boolean: "xsd:boolean"}


def _header():
    return "".join(f"@prefix {prefix}: <{namespace}> .\n" for prefix, namespace in PREFIXES)


def format_certainty(value):
    """At least two decimals, and exact on re-read."""
    text = f"{value:.2f}"
    if float(text) != value:
        text = repr(float(value))
    return text


def _iri(term):
    text = str(term)
    for prefix, namespace in PREFIXES:
        if text.startswith(namespace):
            local = text[len(namespace):]
            if _LOCAL_NAME.match(local):
                return f"{prefix}:{local}"
    return f"<{text}>"


def _escape(char):
    if char in _ESCAPES:
        return _ESCAPES[char]
    if char < " " or char == "\x7f" or char in _LINE_BREAKS:
        return f"\\u{ord(char):04X}"
    return char


def _literal(term):
    body = "".join(_escape(char) for char in str(term))
    if term.language:
        return f'"{body}"@{term.language}'
    if term.datatype is None:
        return f'"{body}"'
    return f'"{body}"^^{_DATATYPE_NAMES.get(term.datatype) or _iri(term.datatype)}'


def _term(term):
    return _iri(term) if isinstance(term, URIRef) else _literal(term)


def _triple_text(triple):
    return " ".join(_term(term) for term in triple)


def serialize_trig_star(store):
    lines = [_header()]

    def emit(graph):
        for _, annotated in store.match(graph=graph):
            text = _triple_text(annotated.triple)
            lines.append(f"{text} .")
            if annotated.certainty is not None:
                value = format_certainty(annotated.certainty)
                lines.append(f'<< {text} >> {_iri(CERTAINTY)} "{value}"^^xsd:double .')

    emit(DEFAULT_GRAPH)
    for graph in store.named_graphs:
        lines.append("")
        lines.append(f"{_iri(graph)} {{")
        emit(graph)
        lines.append("}")
    return "\n".join(lines) + "\n"


def _expand_iri(text, line_number):
    if text.startswith("<") and text.endswith(">"):
        return URIRef(text[1:-1])
    prefix, _, local = text.partition(":")
    for name, namespace in PREFIXES:
        if name == prefix:
            return URIRef(namespace + local)
    raise TrigSyntaxError(f"unknown prefix in {text!r}", line_number)


def _line_of(exc):
    line = getattr(exc, "lines", None)
    if isinstance(line, int):
        return line + 1
    found = re.search(r"line (\d+)", str(exc))
    return int(found.group(1)) if found else 1


def _parse_quoted(text, header, line_number):
    graph = Graph(bind_namespaces="none")
    try:
        graph.parse(data=f"{header}{text} .\n", format="turtle")
    except Exception as exc:
        raise TrigSyntaxError(f"bad quoted triple: {exc}", line_number) from exc
    triples = list(graph)
    if len(triples) != 1:
        raise TrigSyntaxError("a quoted triple must hold exactly one triple", line_number)
    return triples[0]


def parse_trig_star(text):
    """Read a document written by ``serialize_trig_star`` back into a GraphStore."""
    header = _header()

    # Quoted-triple annotations are not TriG 1.1: strip them (blank lines keep
    # the numbering) and hand the remainder to rdflib.
    plain_lines = []
    annotations = []
    current_graph = DEFAULT_GRAPH
    for number, line in enumerate(text.split("\n"), start=1):
        stripped = line.strip()
        opened = _GRAPH_OPEN.match(stripped)
        if opened:
            current_graph = _expand_iri(opened.group("graph"), number)
        elif _GRAPH_CLOSE.match(stripped):
            current_graph = DEFAULT_GRAPH
        if stripped.startswith("<<"):
            found = _ANNOTATION.match(stripped)
            if not found:
                raise TrigSyntaxError("malformed quoted-triple annotation", number)
            annotations.append((number, current_graph, found))
            plain_lines.append("")
        else:
            plain_lines.append(line)

    dataset = Dataset()
    try:
        dataset.parse(data="\n".join(plain_lines) + "\n", format="trig")
    except Exception as exc:
        raise TrigSyntaxError(str(exc), _line_of(exc)) from exc

    store = GraphStore()
    for context in dataset.graphs():
        identifier = context.identifier
        graph = DEFAULT_GRAPH if identifier == DATASET_DEFAULT_GRAPH_ID else URIRef(identifier)
        for triple in context:
            store.add(triple, graph)

    for number, graph, found in annotations:
        triple = _parse_quoted(found.group("triple"), header, number)
        if _expand_iri(found.group("predicate"), number) != CERTAINTY:
            raise TrigSyntaxError("only certainty annotations are supported", number)
        if found.group("datatype") not in ("xsd:double", f"<{XSD.double}>"):
            raise TrigSyntaxError("certainty must be an xsd:double literal", number)
        if not store.holds(triple, graph):
            raise TrigSyntaxError("annotation of a triple that is not asserted", number)
        try:
            certainty = float(found.group("value"))
        except ValueError as exc:
            raise TrigSyntaxError(f"bad certainty {found.group('value')!r}", number) from exc
        store.add(triple, graph, certainty)
    logger.debug("parsed %d triples in %d named graphs", len(store), len(store.named_graphs))
    return store


def write_trig_star(store, path):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(serialize_trig_star(store), encoding="utf-8")


def read_trig_star(path):
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise CorpusIoError(f"cannot read graph {path}: {exc}") from exc
    return parse_trig_star(text)


def serialize_ntriples(store):
    """N-Triples of the default graph only, lines sorted."""
    graph = Graph(bind_namespaces="none")
    for _, annotated in store.match(graph=DEFAULT_GRAPH):
        graph.add(annotated.triple)
    body = graph.serialize(format="nt")
    lines = sorted(line for line in body.splitlines() if line.strip())
    return "\n".join(lines) + ("\n" if lines else "")
