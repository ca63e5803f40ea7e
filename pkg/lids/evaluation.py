"""Precision@k / recall@k of a table-relatedness ranking against ground truth."""
import logging

import numpy as np
import pandas as pd
from rdflib.namespace import RDF, RDFS

from .exceptions import CorpusIoError
from .graph import DEFAULT_GRAPH
from .vocabulary import IS_JOINABLE_WITH, IS_UNIONABLE_WITH, Classes

logger = logging.getLogger(__name__)


def load_ground_truth(path):
    """``query_table,related_table`` CSV -> {query: {related, ...}}."""
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False)
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as exc:
        raise CorpusIoError(f"cannot read ground truth {path}: {exc}") from exc
    missing = {"query_table", "related_table"} - set(frame.columns)
    if missing:
        raise CorpusIoError(f"ground truth {path} lacks columns {sorted(missing)}")
    truth: dict[str, set] = {}
    for query, related in zip(frame["query_table"], frame["related_table"]):
        truth.setdefault(query.strip(), set())
        if related.strip() and related.strip() != query.strip():
            truth[query.strip()].add(related.strip())
    return truth


def relatedness_ranking(store, kind="union", key="uri"):
    """{table: [related tables by descending certainty]} from the table-level edges.

    ``key="label"`` names tables by their file name instead of their URI.
    """
    predicate = IS_UNIONABLE_WITH if kind == "union" else IS_JOINABLE_WITH

    def name(node):
        return str(store.value(node, RDFS.label, graph=DEFAULT_GRAPH)) if key == "label" else str(node)

    ranking = {}
    for table in store.subjects(RDF.type, Classes.TABLE, graph=DEFAULT_GRAPH):
        hits = [(at.certainty or 0.0, name(at.triple.object))
                for _, at in store.match(table, predicate, None, graph=DEFAULT_GRAPH)]
        hits.sort(key=lambda hit: (-hit[0], hit[1]))
        ranking[name(table)] = [hit for _, hit in hits]
    return ranking


def precision_recall_at_k(ranking, ground_truth, k_values, num_queries, seed=42):
    """Mean P@k and R@k over seeded, sampled queries; one row per k.

    Queries without related tables are skipped before sampling.
    """
    candidates = sorted(query for query, related in ground_truth.items() if related)
    if not candidates:
        return pd.DataFrame(columns=["k", "precision", "recall", "queries"])
    rng = np.random.default_rng(seed)
    size = min(num_queries, len(candidates))
    queries = [str(q) for q in rng.choice(np.array(candidates, dtype=object), size=size, replace=False)]
    rows = []
    for k in k_values:
        precisions, recalls = [], []
        for query in queries:
            related = ground_truth[query]
            hits = len(set(ranking.get(query, [])[:k]) & related)
            precisions.append(hits / k)
            recalls.append(hits / len(related))
        rows.append({"k": k, "precision": float(np.mean(precisions)), "recall": float(np.mean(recalls)),
                     "queries": len(queries)})
    logger.info("evaluated %d queries at k=%s", len(queries), list(k_values))
    return pd.DataFrame(rows, columns=["k", "precision", "recall", "queries"])
