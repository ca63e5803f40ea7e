"""
Predefined discovery and recommendation operations over a built LiDS graph.

Every operation is a pure function of the GraphStore (and VectorIndex where
datasets are routed by similarity) and returns a ``pandas.DataFrame`` with a
documented row order.
"""
import logging
import re
from collections import Counter, defaultdict, deque
from pathlib import Path

import pandas as pd
from rdflib import Literal, URIRef
from rdflib.namespace import RDF, RDFS

from .construction import greedy_matching, statistics_rows
from .embeddings import DefaultEmbedder, Gazetteer, WordLexicon
from .exceptions import InvalidName, InvalidQuery, NotFound
from .graph import DEFAULT_GRAPH
from .index import top_k
from .profiler import ProfilerContext, embed_dataset, profile_table
from .vocabulary import (
    CALLS_LIBRARY, HAS_AUTHOR, HAS_DATASET, HAS_PARAMETER, HAS_PKFK_SIMILARITY, HAS_SCORE, HAS_TAG, HAS_URL,
    IN_CONTROL_FLOW, IS_JOINABLE_WITH, IS_PART_OF, IS_UNIONABLE_WITH, READS, SIMILARITY_PREDICATES, Classes,
    library_path, make_resource_uri,
)

logger = logging.getLogger(__name__)

DEFAULT_PREPROCESSING_MARKERS = (".preprocessing.",)
DEFAULT_CLEANING_OPERATIONS = ("fillna", "dropna", "interpolate")
DEFAULT_TASK_MODEL_PATTERNS = {
    "classification": r"Classifier|SVC|LogisticRegression",
    "regression": r"Regressor|SVR|LinearRegression|Ridge|Lasso",
    "clustering": r"KMeans|DBSCAN|AgglomerativeClustering",
}


def _frame(rows, columns):
    return pd.DataFrame(rows, columns=list(columns))


def _label(store, node):
    value = store.value(node, RDFS.label, graph=DEFAULT_GRAPH)
    return str(value) if value is not None else str(node).rsplit("/", 1)[-1]


def _typed(store, node, cls):
    return store.holds((node, RDF.type, cls))


def _resource(ref):
    """A full IRI, or ``source/dataset[/table[/column]]`` shorthand."""
    ref = str(ref)
    if ref.startswith(("http://", "https://")):
        return URIRef(ref)
    return make_resource_uri([part for part in ref.strip("/").split("/")])


def resolve_table(store, ref):
    table = _resource(ref)
    if not _typed(store, table, Classes.TABLE):
        raise NotFound(f"unknown table {ref}")
    return table


def _children(store, parent, cls):
    return sorted((s for s in store.subjects(IS_PART_OF, parent, graph=DEFAULT_GRAPH) if _typed(store, s, cls)),
                  key=str)


# ---------------------------------------------------------------------------
# pipelines
# ---------------------------------------------------------------------------


def pipeline_graphs(store):
    return sorted({g for g, _ in store.match(None, RDF.type, Classes.PIPELINE) if g is not DEFAULT_GRAPH}, key=str)


def pipeline_metadata(store, graph):
    score = store.value(graph, HAS_SCORE, graph=graph)
    url = store.value(graph, HAS_URL, graph=graph)
    return {
        "pipeline": str(graph),
        "pipeline_id": str(store.value(graph, RDFS.label, graph=graph) or ""),
        "author": str(store.value(graph, HAS_AUTHOR, graph=graph) or ""),
        "score": float(score.toPython()) if score is not None else 0.0,
        "tags": sorted(str(tag) for tag in store.objects(graph, HAS_TAG, graph=graph)),
        "url": str(url) if url is not None else "",
        "dataset": str(store.value(graph, HAS_DATASET, graph=graph) or ""),
    }


def _tagged(store, graph, task):
    if task is None:
        return True
    wanted = task.strip().lower()
    return any(str(tag).strip().lower() == wanted for tag in store.objects(graph, HAS_TAG, graph=graph))


def _called_paths(store, graph):
    """(statement, dotted library path) for every call in one pipeline.

    Import statements are not counted as calls.
    """
    imports = set(store.subjects(IN_CONTROL_FLOW, Literal("import"), graph=graph))
    return [
        (at.triple.subject, library_path(at.triple.object))
        for _, at in store.match(None, CALLS_LIBRARY, None, graph=graph)
        if library_path(at.triple.object) and at.triple.subject not in imports
    ]


def get_top_k_library_used(store, k=10, task=None):
    """Top-level libraries by number of distinct pipelines calling them or their descendants.

    Sorted by pipeline count desc, then library name. Python builtins are not ranked.
    Counts roll up to the top-level library; ``get_most_used_subpackages`` ranks
    the sub-libraries of one library.
    """
    counts = Counter()
    for graph in pipeline_graphs(store):
        if not _tagged(store, graph, task):
            continue
        libraries = {path.split(".")[0] for _, path in _called_paths(store, graph)}
        counts.update(libraries - {"builtins"})
    rows = sorted(counts.items(), key=lambda item: (-item[1], item[0]))[:k]
    return _frame(rows, ("library", "pipeline_count"))


def get_top_used_libraries(store, k=10, task=None):
    return get_top_k_library_used(store, k, task)


def get_most_used_subpackages(store, library, k=10):
    """Immediate children of ``library`` by number of distinct pipelines calling into them."""
    depth = len(library.split("."))
    counts = Counter()
    for graph in pipeline_graphs(store):
        children = {
            ".".join(path.split(".")[:depth + 1])
            for _, path in _called_paths(store, graph)
            if path.startswith(library + ".")
        }
        counts.update(children)
    rows = sorted(counts.items(), key=lambda item: (-item[1], item[0]))[:k]
    return _frame(rows, ("subpackage", "pipeline_count"))


def get_pipelines_calling_libraries(store, *libraries):
    """Pipelines calling every given library path; score desc, then id."""
    libraries = [lib for lib in libraries if lib]
    if not libraries:
        raise InvalidQuery("at least one library path is required")
    rows = []
    for graph in pipeline_graphs(store):
        called = {path for _, path in _called_paths(store, graph)}
        if all(lib in called for lib in libraries):
            meta = pipeline_metadata(store, graph)
            rows.append({**meta, "tags": ";".join(meta["tags"])})
    rows.sort(key=lambda row: (-row["score"], row["pipeline_id"], row["pipeline"]))
    return _frame(rows, ("pipeline", "pipeline_id", "author", "score", "tags", "url", "dataset"))


def get_pipeline_sizes(store, max_statements=None):
    """Pipelines with their statement counts, shortest first."""
    rows = []
    for graph in pipeline_graphs(store):
        size = len(store.subjects(RDF.type, Classes.STATEMENT, graph=graph))
        if max_statements is None or size <= max_statements:
            rows.append((str(graph), pipeline_metadata(store, graph)["pipeline_id"], size))
    rows.sort(key=lambda row: (row[2], row[0]))
    return _frame(rows, ("pipeline", "pipeline_id", "statements"))


# ---------------------------------------------------------------------------
# datasets and tables
# ---------------------------------------------------------------------------


def search_keywords(store, conditions):
    """Tables whose dataset, table or column labels match the conditions.

    ``conditions`` is a list of alternatives; an alternative is a term or a
    list of terms that must all match. Matching is case-insensitive substring.
    """
    if not isinstance(conditions, (list, tuple)) or not conditions:
        raise InvalidQuery("keyword conditions must be a non-empty list")
    alternatives = []
    for alternative in conditions:
        terms = [alternative] if isinstance(alternative, str) else list(alternative)
        if not terms or not all(isinstance(t, str) and t.strip() for t in terms):
            raise InvalidQuery(f"empty keyword condition in {conditions!r}")
        alternatives.append([t.strip().lower() for t in terms])

    rows = []
    for table in sorted(store.subjects(RDF.type, Classes.TABLE, graph=DEFAULT_GRAPH), key=str):
        dataset = store.value(table, IS_PART_OF, graph=DEFAULT_GRAPH)
        source = store.value(dataset, IS_PART_OF, graph=DEFAULT_GRAPH)
        labels = [_label(store, table), _label(store, dataset)]
        labels += [_label(store, column) for column in _children(store, table, Classes.COLUMN)]
        labels = [label.lower() for label in labels]
        if any(all(any(term in label for label in labels) for term in terms) for terms in alternatives):
            rows.append((_label(store, source), _label(store, dataset), _label(store, table), str(table)))
    return _frame(rows, ("source", "dataset", "table", "table_uri"))


def _column_pair_scores(store, table_a, table_b, predicates):
    columns_b = set(_children(store, table_b, Classes.COLUMN))
    scores = {}
    for column_a in _children(store, table_a, Classes.COLUMN):
        for predicate in predicates:
            for _, at in store.match(column_a, predicate, None, graph=DEFAULT_GRAPH):
                column_b = at.triple.object
                if column_b in columns_b:
                    key = (column_a, column_b)
                    scores[key] = max(scores.get(key, 0.0), at.certainty or 0.0)
    return [(a, b, s) for (a, b), s in scores.items()]


def find_unionable_columns(store, table_a, table_b):
    """Greedily matched column pairs of two tables; score desc."""
    table_a, table_b = resolve_table(store, table_a), resolve_table(store, table_b)
    predicates = (SIMILARITY_PREDICATES["LabelSimilarity"], SIMILARITY_PREDICATES["ContentSimilarity"])
    matched = greedy_matching(_column_pair_scores(store, table_a, table_b, predicates))
    rows = [(_label(store, a), _label(store, b), score, str(a), str(b)) for a, b, score in matched]
    rows.sort(key=lambda row: (-row[2], row[0], row[1]))
    return _frame(rows, ("column_a", "column_b", "score", "column_a_uri", "column_b_uri"))


def _related_tables(store, table, predicate, k):
    table = resolve_table(store, table)
    rows = [
        (_label(store, at.triple.object), str(at.triple.object), at.certainty or 0.0)
        for _, at in store.match(table, predicate, None, graph=DEFAULT_GRAPH)
    ]
    rows.sort(key=lambda row: (-row[2], row[1]))
    return _frame(rows[:k], ("table", "table_uri", "score"))


def get_unionable_tables(store, table, k=10):
    return _related_tables(store, table, IS_UNIONABLE_WITH, k)


def get_joinable_tables(store, table, k=10):
    return _related_tables(store, table, IS_JOINABLE_WITH, k)


def _join_columns(store, table_a, table_b):
    pairs = _column_pair_scores(store, table_a, table_b, (HAS_PKFK_SIMILARITY,))
    return sorted(f"{_label(store, a)}={_label(store, b)}" for a, b, _ in pairs)


def get_path_to_table(store, start_table, target_table=None, hops=2):
    """Simple join paths from ``start_table`` of at most ``hops`` edges; shortest first."""
    if hops < 1:
        raise InvalidQuery("hops must be at least 1")
    start = resolve_table(store, start_table)
    target = resolve_table(store, target_table) if target_table else None

    def neighbours(table):
        return sorted(set(store.objects(table, IS_JOINABLE_WITH, graph=DEFAULT_GRAPH)), key=str)

    paths = []
    queue = deque([(start,)])
    while queue:
        path = queue.popleft()
        if len(path) > 1 and (target is None or path[-1] == target):
            paths.append(path)
        if len(path) - 1 == hops:
            continue
        for nxt in neighbours(path[-1]):
            if nxt not in path:
                queue.append(path + (nxt,))

    rows = []
    for path in paths:
        steps = [";".join(_join_columns(store, a, b)) for a, b in zip(path, path[1:])]
        rows.append((len(path) - 1, " -> ".join(_label(store, t) for t in path),
                     " | ".join(steps), " ".join(str(t) for t in path)))
    rows.sort(key=lambda row: (row[0], row[3]))
    return _frame(rows, ("hops", "path", "join_columns", "path_uris"))


def get_top_used_columns(store, table, k=10):
    """Columns of ``table`` by number of distinct pipeline statements reading them."""
    table = resolve_table(store, table)
    rows = []
    for column in _children(store, table, Classes.COLUMN):
        readers = {at.triple.subject for _, at in store.match(None, READS, column)}
        if readers:
            rows.append((_label(store, column), str(column), len(readers)))
    rows.sort(key=lambda row: (-row[2], row[0]))
    return _frame(rows[:k], ("column", "column_uri", "statement_count"))


def graph_stats(store):
    return _frame(statistics_rows(store), ("category", "triples", "percent"))


# ---------------------------------------------------------------------------
# recommendations
# ---------------------------------------------------------------------------


def route_unseen_dataset(index, directory, config, min_similarity=None):
    """Profile a directory of CSV files in memory and return the most similar known dataset."""
    context = ProfilerContext(
        word_lexicon=WordLexicon.load(config["lexicon_path"]),
        gazetteer=Gazetteer.load(config["gazetteer_path"]),
        embedder=DefaultEmbedder(config.get("seed", 42)),
        sample_size=config.get("sample_size", 1000),
    )
    tables = [profile_table(path, "unseen", directory.name, context) for path in sorted(directory.glob("*.csv"))]
    if not tables:
        raise NotFound(f"no CSV tables under {directory}")
    hits = top_k(index, embed_dataset(tables), 1, "dataset")
    if not hits or (min_similarity is not None and hits[0][1] < min_similarity):
        raise NotFound(f"no known dataset is similar enough to {directory}")
    logger.info("routed unseen dataset %s to %s (cosine %.3f)", directory, hits[0][0], hits[0][1])
    return hits[0][0]


def resolve_dataset(store, index, ref, config=None, min_similarity=None):
    """A known dataset ID, else a directory of CSV files routed to its nearest known dataset."""
    try:
        dataset = _resource(ref)
    except InvalidName:
        dataset = None
    if dataset is not None and _typed(store, dataset, Classes.DATASET):
        return dataset
    directory = Path(str(ref))
    if index is not None and directory.is_dir():
        return route_unseen_dataset(index, directory, config or {}, min_similarity)
    raise NotFound(f"unknown dataset {ref}")


def dataset_pipelines(store, dataset):
    """Pipelines declared on ``dataset`` or reading one of its tables or columns."""
    members = set()
    for table in _children(store, dataset, Classes.TABLE):
        members.add(table)
        members.update(_children(store, table, Classes.COLUMN))
    graphs = set()
    for graph in pipeline_graphs(store):
        if store.holds((graph, HAS_DATASET, dataset), graph):
            graphs.add(graph)
            continue
        if any(at.triple.object in members for _, at in store.match(None, READS, None, graph=graph)):
            graphs.add(graph)
    return sorted(graphs, key=str)


def _transformation(path, markers, cleaning):
    for marker in markers:
        position = path.find(marker)
        if position >= 0:
            head = path[:position + len(marker)]
            tail = path[position + len(marker):].split(".")[0]
            return head + tail
    if path.rsplit(".", 1)[-1] in cleaning:
        return path
    return None


def _columns_read(store, graph, statement):
    return [
        _label(store, at.triple.object)
        for _, at in store.match(statement, READS, None, graph=graph)
        if _typed(store, at.triple.object, Classes.COLUMN)
    ]


def recommend_transformations(store, index, dataset, config=None, min_similarity=None):
    """Preprocessing and cleaning calls used on a dataset: distinct pipelines, most-read column."""
    config = config or {}
    markers = tuple(config.get("preprocessing_markers", DEFAULT_PREPROCESSING_MARKERS))
    cleaning = tuple(config.get("cleaning_operations", DEFAULT_CLEANING_OPERATIONS))
    dataset = resolve_dataset(store, index, dataset, config, min_similarity)
    usage = defaultdict(set)
    columns = defaultdict(Counter)
    for graph in dataset_pipelines(store, dataset):
        for statement, path in _called_paths(store, graph):
            name = _transformation(path, markers, cleaning)
            if name is None:
                continue
            usage[name].add(graph)
            columns[name].update(_columns_read(store, graph, statement))
    rows = []
    for name, graphs in usage.items():
        ranked = sorted(columns[name].items(), key=lambda item: (-item[1], item[0]))
        rows.append((name, len(graphs), ranked[0][0] if ranked else ""))
    rows.sort(key=lambda row: (-row[1], row[0]))
    return _frame(rows, ("transformation", "usage_count", "example_column"))


def _model_class(path, pattern):
    parts = path.split(".")
    for position, part in enumerate(parts):
        if re.search(pattern, part):
            return ".".join(parts[:position + 1])
    return None


def recommend_ml_models(store, index, dataset, task, config=None, min_similarity=None):
    """Model classes used on a dataset for a task, with the best pipeline score per model."""
    config = config or {}
    patterns = {key.lower(): value for key, value in
                config.get("task_model_patterns", DEFAULT_TASK_MODEL_PATTERNS).items()}
    pattern = patterns.get(task.strip().lower())
    if pattern is None:
        raise InvalidQuery(f"unknown task {task!r}; known tasks: {', '.join(sorted(patterns))}")
    dataset = resolve_dataset(store, index, dataset, config, min_similarity)
    best = {}
    for graph in dataset_pipelines(store, dataset):
        if not _tagged(store, graph, task):
            continue
        score = pipeline_metadata(store, graph)["score"]
        for _, path in _called_paths(store, graph):
            model = _model_class(path, pattern)
            if model is not None:
                best[model] = max(best.get(model, float("-inf")), score)
    rows = sorted(best.items(), key=lambda item: (-item[1], item[0]))
    return _frame(rows, ("model", "best_pipeline_score"))


def recommend_hyperparameters(store, index, dataset, model, config=None, min_similarity=None):
    """(name, value) pairs passed to ``model`` across a dataset's pipelines, by frequency."""
    dataset = resolve_dataset(store, index, dataset, config, min_similarity)
    counts = Counter()
    for graph in dataset_pipelines(store, dataset):
        for statement, path in _called_paths(store, graph):
            if path != model and not path.endswith("." + model):
                continue
            for literal in store.objects(statement, HAS_PARAMETER, graph=graph):
                name, _, value = str(literal).partition("=")
                counts[(name, value)] += 1
    rows = sorted(((name, value, count) for (name, value), count in counts.items()),
                  key=lambda row: (-row[2], row[0], row[1]))
    return _frame(rows, ("param", "value", "frequency"))
