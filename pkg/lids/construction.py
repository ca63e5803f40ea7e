"""
LiDS graph construction.

The default graph holds the data global schema (source / dataset / table /
column nodes with statistics, column similarity edges and table-level
unionable / joinable edges) and the library hierarchy. Each pipeline lives in
its own named graph, linked to the schema through ``pipeline:reads``.
"""
import json
import logging
from collections import Counter
from dataclasses import asdict, dataclass
from pathlib import Path

import jellyfish
from rdflib import Literal, URIRef
from rdflib.namespace import RDF, RDFS

from .graph import DEFAULT_GRAPH, GraphStore
from .index import VectorIndex, cosine
from .library_docs import emit_library_graph
from .parallel import map_partitions, partition
from .pipelines import called_paths, emit_pipeline_graph, pipeline_graph_name
from .profiler import FINE_GRAINED_TYPES, embed_dataset, embed_table, group_by_table
from .values import name_tokens
from .vocabulary import (
    CALLS_LIBRARY, HAS_DATA_FLOW_TO, HAS_DATA_TYPE, HAS_DISTINCT_VALUE_COUNT, HAS_MAX_LENGTH,
    HAS_MAX_VALUE, HAS_MEAN_LENGTH, HAS_MEAN_VALUE, HAS_MIN_LENGTH, HAS_MIN_VALUE,
    HAS_MISSING_VALUE_COUNT, HAS_NEXT_STATEMENT, HAS_PARAMETER, HAS_TEXT, HAS_TOTAL_VALUE_COUNT,
    HAS_TRUE_RATIO, IN_CONTROL_FLOW, IS_JOINABLE_WITH, IS_PART_OF, IS_UNIONABLE_WITH, READS,
    SIMILARITY_PREDICATES, Classes, dataset_uri, source_uri, statement_uri, table_uri,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ThresholdConfig:
    alpha: float = 0.75
    beta: float = 0.95
    theta: float = 0.90
    gamma: float = 0.60

    def __post_init__(self):
        for name, value in asdict(self).items():
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"threshold {name}={value} outside [0, 1]")


@dataclass(frozen=True)
class SimilarityEdge:
    source: URIRef
    target: URIRef
    kind: str
    score: float

    def reversed(self):
        return SimilarityEdge(self.target, self.source, self.kind, self.score)

    @property
    def predicate(self):
        return SIMILARITY_PREDICATES[self.kind]


@dataclass(frozen=True)
class TableRelation:
    table_a: URIRef
    table_b: URIRef
    kind: str
    score: float
    matches: tuple = ()


def _clamp(score):
    return min(1.0, max(0.0, float(score)))


# ---------------------------------------------------------------------------
# metadata subgraph
# ---------------------------------------------------------------------------


def build_metadata_subgraph(profile):
    meta = profile.metadata
    source = source_uri(meta.source)
    dataset = dataset_uri(meta.source, meta.dataset)
    table = table_uri(meta.source, meta.dataset, meta.table)
    column = meta.column_uri
    stats = profile.stats
    triples = [
        (source, RDF.type, Classes.SOURCE),
        (source, RDFS.label, Literal(meta.source)),
        (dataset, RDF.type, Classes.DATASET),
        (dataset, RDFS.label, Literal(meta.dataset)),
        (dataset, IS_PART_OF, source),
        (table, RDF.type, Classes.TABLE),
        (table, RDFS.label, Literal(meta.table)),
        (table, IS_PART_OF, dataset),
        (column, RDF.type, Classes.COLUMN),
        (column, RDFS.label, Literal(meta.column)),
        (column, IS_PART_OF, table),
        (column, HAS_DATA_TYPE, Literal(profile.fgt)),
        (column, HAS_TOTAL_VALUE_COUNT, Literal(stats.total_count)),
        (column, HAS_DISTINCT_VALUE_COUNT, Literal(stats.distinct_count)),
        (column, HAS_MISSING_VALUE_COUNT, Literal(stats.missing_count)),
    ]
    optional = (
        (HAS_MIN_VALUE, stats.min_value, float),
        (HAS_MAX_VALUE, stats.max_value, float),
        (HAS_MEAN_VALUE, stats.mean_value, float),
        (HAS_TRUE_RATIO, stats.true_ratio, float),
        (HAS_MIN_LENGTH, stats.min_length, int),
        (HAS_MAX_LENGTH, stats.max_length, int),
        (HAS_MEAN_LENGTH, stats.mean_length, float),
    )
    for predicate, value, cast in optional:
        if value is not None:
            triples.append((column, predicate, Literal(cast(value))))
    return triples


# ---------------------------------------------------------------------------
# column similarity
# ---------------------------------------------------------------------------


def label_similarity(name_a, name_b, lexicon):
    vector_a = lexicon.mean_vector(name_tokens(name_a))
    vector_b = lexicon.mean_vector(name_tokens(name_b))
    if vector_a is not None and vector_b is not None:
        return _clamp(cosine(vector_a, vector_b))
    longest = max(len(name_a), len(name_b))
    if not longest:
        return 1.0
    return _clamp(1.0 - jellyfish.levenshtein_distance(name_a, name_b) / longest)


def content_similarity(cp_i, cp_j):
    if cp_i.fgt == "boolean":
        return _clamp(1.0 - abs((cp_i.stats.true_ratio or 0.0) - (cp_j.stats.true_ratio or 0.0)))
    return _clamp(cosine(cp_i.embedding, cp_j.embedding))


def column_similarity_worker(cp_i, cp_j, thresholds, lexicon):
    """Similarity edges from ``cp_i`` to ``cp_j``; empty unless same type, different tables."""
    if cp_i.fgt != cp_j.fgt or cp_i.metadata.table_key == cp_j.metadata.table_key:
        return []
    source, target = cp_i.metadata.column_uri, cp_j.metadata.column_uri
    edges = []
    label = label_similarity(cp_i.metadata.column, cp_j.metadata.column, lexicon)
    if label >= thresholds.alpha:
        edges.append(SimilarityEdge(source, target, "LabelSimilarity", label))
    content = content_similarity(cp_i, cp_j)
    content_threshold = thresholds.beta if cp_i.fgt == "boolean" else thresholds.theta
    if content >= content_threshold:
        edges.append(SimilarityEdge(source, target, "ContentSimilarity", content))
        if max(cp_i.stats.distinct_ratio, cp_j.stats.distinct_ratio) >= thresholds.gamma:
            edges.append(SimilarityEdge(source, target, "PkFkSimilarity", content))
    return edges


def candidate_pairs(profiles):
    """(i, j) with i < j over ``profiles``: same fine-grained type, different tables."""
    by_type: dict[str, list[int]] = {}
    for position, profile in enumerate(profiles):
        by_type.setdefault(profile.fgt, []).append(position)
    pairs = []
    for fgt in FINE_GRAINED_TYPES:
        members = by_type.get(fgt, [])
        for a, i in enumerate(members):
            for j in members[a + 1:]:
                if profiles[i].metadata.table_key != profiles[j].metadata.table_key:
                    pairs.append((i, j))
    return pairs


_WORKER_STATE: dict = {}


def _init_similarity_worker(thresholds, lexicon):
    _WORKER_STATE["thresholds"] = thresholds
    _WORKER_STATE["lexicon"] = lexicon


def _similarity_partition(pairs):
    thresholds, lexicon = _WORKER_STATE["thresholds"], _WORKER_STATE["lexicon"]
    edges = []
    for cp_i, cp_j in pairs:
        edges.extend(column_similarity_worker(cp_i, cp_j, thresholds, lexicon))
    return edges


def compute_similarity_edges(profiles, thresholds, lexicon, workers=1, partition_size=5000, edges_dir=None):
    """Both directions of every similarity edge, sorted."""
    pairs = [(profiles[i], profiles[j]) for i, j in candidate_pairs(profiles)]
    parts = partition(pairs, partition_size)
    results = map_partitions(_similarity_partition, parts, workers,
                             initializer=_init_similarity_worker, initargs=(thresholds, lexicon))
    if edges_dir is not None:
        write_edge_parts(results, edges_dir)
    edges = {edge for part in results for found in part for edge in (found, found.reversed())}
    logger.info("examined %d column pairs in %d partitions, %d similarity edges",
                len(pairs), len(parts), len(edges))
    return sorted(edges, key=lambda e: (e.kind, str(e.source), str(e.target)))


def write_edge_parts(results, edges_dir):
    edges_dir = Path(edges_dir)
    edges_dir.mkdir(parents=True, exist_ok=True)
    for stale in edges_dir.glob("part-*.json"):
        stale.unlink()
    for number, edges in enumerate(results):
        records = [{"source": str(e.source), "target": str(e.target), "kind": e.kind, "score": e.score}
                   for e in edges]
        (edges_dir / f"part-{number:05d}.json").write_text(json.dumps(records, indent=1), encoding="utf-8")


# ---------------------------------------------------------------------------
# table relatedness
# ---------------------------------------------------------------------------


def greedy_matching(scored_pairs):
    """One-to-one matching by descending score; ties by column ids."""
    used_a, used_b, matched = set(), set(), []
    for col_a, col_b, score in sorted(scored_pairs, key=lambda p: (-p[2], str(p[0]), str(p[1]))):
        if col_a in used_a or col_b in used_b:
            continue
        used_a.add(col_a)
        used_b.add(col_b)
        matched.append((col_a, col_b, score))
    return matched


def table_relatedness(edges, tables):
    """Unionable and joinable table pairs.

    ``tables`` maps a table URI to its column URIs. Each relation is reported
    once with ``table_a < table_b``.
    """
    table_of = {column: table for table, columns in tables.items() for column in columns}
    union_scores: dict[tuple, dict] = {}
    join_scores: dict[tuple, dict] = {}
    for edge in edges:
        table_a, table_b = table_of.get(edge.source), table_of.get(edge.target)
        if table_a is None or table_b is None or str(table_a) >= str(table_b):
            continue
        pair_key = (edge.source, edge.target)
        bucket = join_scores if edge.kind == "PkFkSimilarity" else union_scores
        scores = bucket.setdefault((table_a, table_b), {})
        scores[pair_key] = max(scores.get(pair_key, 0.0), edge.score)

    relations = []
    for kind, bucket in (("union", union_scores), ("join", join_scores)):
        for (table_a, table_b), scores in sorted(bucket.items(), key=lambda item: tuple(map(str, item[0]))):
            matched = greedy_matching([(a, b, s) for (a, b), s in scores.items()])
            size = min(len(tables[table_a]), len(tables[table_b]))
            score = _clamp(sum(s for _, _, s in matched) / size) if size else 0.0
            if score > 0:
                relations.append(TableRelation(table_a, table_b, kind, score, tuple(matched)))
    return relations


def relation_triples(relations):
    """(triple, certainty) pairs, both directions."""
    annotated = []
    for relation in relations:
        predicate = IS_UNIONABLE_WITH if relation.kind == "union" else IS_JOINABLE_WITH
        annotated.append(((relation.table_a, predicate, relation.table_b), relation.score))
        annotated.append(((relation.table_b, predicate, relation.table_a), relation.score))
    return annotated


# ---------------------------------------------------------------------------
# graph linker
# ---------------------------------------------------------------------------


def _dataset_tables(store, dataset):
    tables = {}
    for table in store.subjects(IS_PART_OF, dataset, graph=DEFAULT_GRAPH):
        if store.holds((table, RDF.type, Classes.TABLE)):
            tables[str(store.value(table, RDFS.label, graph=DEFAULT_GRAPH))] = table
    return tables


def _table_columns(store, table):
    return {
        str(store.value(column, RDFS.label, graph=DEFAULT_GRAPH)): column
        for column in store.subjects(IS_PART_OF, table, graph=DEFAULT_GRAPH)
        if store.holds((column, RDF.type, Classes.COLUMN))
    }


def link_pipelines(irs, store):
    """{pipeline graph name: reads triples} for detected reads that exist in the schema.

    Column reads are matched against the tables the pipeline reads, or every
    table of its dataset when no table read was linked.
    """
    links = {}
    for ir in irs:
        meta = ir.metadata
        tables = _dataset_tables(store, dataset_uri(meta.source, meta.dataset_name))
        triples = []
        read_tables = []
        for statement in ir.statements:
            node = statement_uri(meta.source, meta.dataset_name, meta.pipeline_id, statement.index)
            for name in statement.detected_table_reads:
                if name in tables:
                    triples.append((node, READS, tables[name]))
                    read_tables.append(tables[name])
        candidates = list(dict.fromkeys(read_tables)) or [tables[name] for name in sorted(tables)]
        columns = [_table_columns(store, table) for table in candidates]
        for statement in ir.statements:
            node = statement_uri(meta.source, meta.dataset_name, meta.pipeline_id, statement.index)
            for name in statement.detected_column_reads:
                for table_columns in columns:
                    if name in table_columns:
                        triples.append((node, READS, table_columns[name]))
        links[pipeline_graph_name(meta)] = triples
    return links


# ---------------------------------------------------------------------------
# assembly
# ---------------------------------------------------------------------------


def unique_profiles(profiles):
    """One profile per column URI, ordered by URI."""
    by_uri = {}
    for profile in profiles:
        by_uri.setdefault(str(profile.metadata.column_uri), profile)
    return [by_uri[uri] for uri in sorted(by_uri)]


def index_profiles(profiles):
    index = VectorIndex()
    tables = group_by_table(profiles)
    datasets: dict[tuple, list] = {}
    for (source, dataset, table), members in sorted(tables.items()):
        for profile in members:
            index.add(profile.metadata.column_uri, "column", profile.embedding, profile.fgt)
        index.add(table_uri(source, dataset, table), "table", embed_table(members))
        datasets.setdefault((source, dataset), []).append(members)
    for (source, dataset), members in sorted(datasets.items()):
        index.add(dataset_uri(source, dataset), "dataset", embed_dataset(members))
    return index


def assemble_graph(profiles, irs, doc_index, thresholds, lexicon, workers=1, partition_size=5000, edges_dir=None):
    """GraphStore and VectorIndex for a profiled, abstracted corpus."""
    profiles = unique_profiles(profiles)
    irs = sorted(irs, key=lambda ir: str(pipeline_graph_name(ir.metadata)))
    store = GraphStore()

    for profile in profiles:
        store.add_all(build_metadata_subgraph(profile))

    edges = compute_similarity_edges(profiles, thresholds, lexicon, workers, partition_size, edges_dir)
    for edge in edges:
        store.add((edge.source, edge.predicate, edge.target), DEFAULT_GRAPH, edge.score)

    tables = {}
    for profile in profiles:
        meta = profile.metadata
        tables.setdefault(table_uri(meta.source, meta.dataset, meta.table), []).append(meta.column_uri)
    relations = table_relatedness(edges, tables)
    store.add_all(relation_triples(relations))

    store.add_all(emit_library_graph(doc_index, called_paths(irs)))

    for ir in irs:
        graph, triples = emit_pipeline_graph(ir)
        store.add_all(triples, graph)
    for graph, triples in link_pipelines(irs, store).items():
        store.add_all(triples, graph)

    logger.info("built LiDS graph: %d columns, %d pipelines, %d relations, %d triples",
                len(profiles), len(irs), len(relations), len(store))
    return store, index_profiles(profiles)


def build_lids_graph(profiles_dir, irs_dir, docs_dir, thresholds, lexicon, workers=1, partition_size=5000,
                     edges_dir=None):
    from .corpus import load_irs, load_profiles
    from .library_docs import load_library_docs

    profiles = load_profiles(Path(profiles_dir))
    irs = load_irs(Path(irs_dir))
    doc_index = load_library_docs(Path(docs_dir))
    return assemble_graph(profiles, irs, doc_index, thresholds, lexicon, workers, partition_size, edges_dir)


# ---------------------------------------------------------------------------
# statistics
# ---------------------------------------------------------------------------

STATISTIC_CATEGORIES = (
    "library_call",
    "code_flow",
    "data_flow",
    "node_types",
    "control_flow",
    "column_reads",
    "dataset_reads",
    "parameters",
    "library_hierarchy",
    "statement_text",
    "other",
)

_BY_PREDICATE = {
    CALLS_LIBRARY: "library_call",
    HAS_NEXT_STATEMENT: "code_flow",
    HAS_DATA_FLOW_TO: "data_flow",
    RDF.type: "node_types",
    IN_CONTROL_FLOW: "control_flow",
    HAS_PARAMETER: "parameters",
    HAS_TEXT: "statement_text",
}


def graph_statistics(store):
    """Triple counts per modelled aspect, in ``STATISTIC_CATEGORIES`` order."""
    counts = Counter()
    for _, annotated in store.match():
        subject, predicate, obj = annotated.triple
        category = _BY_PREDICATE.get(predicate)
        if predicate == READS:
            category = "column_reads" if store.holds((obj, RDF.type, Classes.COLUMN)) else "dataset_reads"
        elif predicate == IS_PART_OF and store.holds((subject, RDF.type, Classes.LIBRARY)):
            category = "library_hierarchy"
        counts[category or "other"] += 1
    return {category: counts.get(category, 0) for category in STATISTIC_CATEGORIES}


def statistics_rows(store):
    counts = graph_statistics(store)
    total = sum(counts.values())
    return [
        {"category": category, "triples": count, "percent": round(100.0 * count / total, 2) if total else 0.0}
        for category, count in counts.items()
    ]
