"""Exact cosine nearest-neighbour index over column, table and dataset embeddings."""
import json
import logging
from dataclasses import dataclass

import numpy as np
from rdflib import URIRef

from .exceptions import CorpusIoError, DimensionError

logger = logging.getLogger(__name__)

KINDS = ("column", "table", "dataset")


def cosine(u, v):
    """u.v / (|u||v|); 0.0 when either vector is zero."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != v.shape:
        raise DimensionError(f"cannot compare vectors of shape {u.shape} and {v.shape}")
    norms = np.linalg.norm(u) * np.linalg.norm(v)
    if norms == 0:
        return 0.0
    return float(np.clip(np.dot(u, v) / norms, -1.0, 1.0))


@dataclass(frozen=True)
class IndexEntry:
    id: URIRef
    kind: str
    vector: np.ndarray
    fgt: str | None = None


class VectorIndex:
    def __init__(self, entries=()):
        self._entries: dict[URIRef, IndexEntry] = {}
        for entry in entries:
            self.add(entry.id, entry.kind, entry.vector, entry.fgt)

    def __len__(self):
        return len(self._entries)

    def __contains__(self, entry_id):
        return entry_id in self._entries

    def __iter__(self):
        return iter(sorted(self._entries.values(), key=lambda e: str(e.id)))

    def get(self, entry_id):
        return self._entries.get(entry_id)

    def add(self, entry_id, kind, vector, fgt=None):
        if kind not in KINDS:
            raise ValueError(f"unknown index entry kind {kind!r}")
        vector = np.asarray(vector, dtype=float)
        same_kind = next((e for e in self._entries.values() if e.kind == kind), None)
        if same_kind is not None and same_kind.vector.shape != vector.shape:
            raise DimensionError(
                f"{kind} vectors are {same_kind.vector.shape[0]}-d, got {vector.shape[0]}-d for {entry_id}"
            )
        self._entries[URIRef(entry_id)] = IndexEntry(URIRef(entry_id), kind, vector, fgt)

    def entries(self, kind=None, fgt=None):
        return [e for e in self if (kind is None or e.kind == kind) and (fgt is None or e.fgt == fgt)]

    def to_jsonl(self):
        lines = []
        for entry in self:
            record = {"id": str(entry.id), "kind": entry.kind, "fgt": entry.fgt,
                      "vector": [float(x) for x in entry.vector]}
            lines.append(json.dumps(record, sort_keys=True))
        return "\n".join(lines) + ("\n" if lines else "")

    def write(self, path):
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_jsonl(), encoding="utf-8")

    @classmethod
    def read(cls, path):
        index = cls()
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise CorpusIoError(f"cannot read index {path}: {exc}") from exc
        for number, line in enumerate(text.splitlines(), start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
                index.add(record["id"], record["kind"], record["vector"], record.get("fgt"))
            except (ValueError, KeyError) as exc:
                raise CorpusIoError(f"{path}:{number}: bad index entry ({exc})") from exc
        logger.debug("loaded %d index entries from %s", len(index), path)
        return index


def top_k(index, query_vector, k, kind, fgt_filter=None):
    """Exact top-k by cosine, descending; ties by id."""
    if k < 1:
        raise ValueError("k must be at least 1")
    query_vector = np.asarray(query_vector, dtype=float)
    candidates = index.entries(kind=kind, fgt=fgt_filter)
    if not candidates:
        return []
    matrix = np.vstack([entry.vector for entry in candidates])
    if matrix.shape[1] != query_vector.shape[0]:
        raise DimensionError(f"query is {query_vector.shape[0]}-d, {kind} entries are {matrix.shape[1]}-d")
    norms = np.linalg.norm(matrix, axis=1) * np.linalg.norm(query_vector)
    dots = matrix @ query_vector
    scores = np.divide(dots, norms, out=np.zeros_like(dots), where=norms > 0)
    scores = np.clip(scores, -1.0, 1.0)
    ranked = sorted(zip(candidates, scores), key=lambda pair: (-pair[1], str(pair[0].id)))
    return [(entry.id, float(score)) for entry, score in ranked[:k]]
