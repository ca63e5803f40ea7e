import tempfile
from pathlib import Path

import numpy as np
from django.test import SimpleTestCase
from hypothesis import given, settings as hsettings, strategies as st

from lids.exceptions import CorpusIoError, DimensionError
from lids.index import VectorIndex, cosine, top_k

VECTORS = st.lists(st.lists(st.integers(-3, 3), min_size=4, max_size=4), min_size=1, max_size=50)


def build(vectors, kind="column"):
    index = VectorIndex()
    for number, vector in enumerate(vectors):
        index.add(f"http://example.org/e{number:02d}", kind, vector, "int" if number % 2 else "string")
    return index


class CosineTests(SimpleTestCase):
    def test_zero_vector(self):
        self.assertEqual(cosine([0, 0], [1, 2]), 0.0)

    def test_parallel_and_orthogonal(self):
        self.assertAlmostEqual(cosine([1, 2], [2, 4]), 1.0)
        self.assertAlmostEqual(cosine([1, 0], [0, 3]), 0.0)

    def test_shape_mismatch(self):
        with self.assertRaises(DimensionError):
            cosine([1, 2], [1, 2, 3])


class VectorIndexTests(SimpleTestCase):
    def test_dimension_is_fixed_per_kind(self):
        index = VectorIndex()
        index.add("http://example.org/c", "column", [1, 0, 0])
        index.add("http://example.org/t", "table", [1, 0])
        with self.assertRaises(DimensionError):
            index.add("http://example.org/d", "column", [1, 0])

    def test_unknown_kind(self):
        with self.assertRaises(ValueError):
            VectorIndex().add("http://example.org/x", "row", [1])

    def test_ties_are_broken_by_id(self):
        index = VectorIndex()
        for name in ("b", "a", "c"):
            index.add(f"http://example.org/{name}", "table", [1, 1])
        hits = top_k(index, [1, 1], 2, "table")
        self.assertEqual([str(i) for i, _ in hits], ["http://example.org/a", "http://example.org/b"])

    def test_fgt_filter(self):
        index = build([[1, 0, 0, 0], [1, 0, 0, 0], [0, 1, 0, 0]])
        hits = top_k(index, [1, 0, 0, 0], 5, "column", fgt_filter="int")
        self.assertEqual([str(i) for i, _ in hits], ["http://example.org/e01"])

    def test_empty_kind(self):
        self.assertEqual(top_k(build([[1, 0, 0, 0]]), [1, 0, 0, 0], 3, "dataset"), [])

    def test_bad_k(self):
        with self.assertRaises(ValueError):
            top_k(build([[1, 0, 0, 0]]), [1, 0, 0, 0], 0, "column")

    def test_query_dimension(self):
        with self.assertRaises(DimensionError):
            top_k(build([[1, 0, 0, 0]]), [1, 0], 1, "column")

    def test_jsonl_round_trip(self):
        index = build([[1, 2, 3, 4], [0, 0, 1, 0]])
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "index.jsonl"
            index.write(path)
            restored = VectorIndex.read(path)
        self.assertEqual([(e.id, e.kind, e.fgt) for e in restored], [(e.id, e.kind, e.fgt) for e in index])
        for entry in index:
            np.testing.assert_array_equal(restored.get(entry.id).vector, entry.vector)

    def test_bad_jsonl(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "index.jsonl"
            path.write_text('{"id": "http://example.org/a"}\n', encoding="utf-8")
            with self.assertRaises(CorpusIoError):
                VectorIndex.read(path)
            with self.assertRaises(CorpusIoError):
                VectorIndex.read(Path(tmp) / "missing.jsonl")

    @hsettings(max_examples=50, deadline=None)
    @given(VECTORS, st.lists(st.integers(-3, 3), min_size=4, max_size=4), st.integers(1, 60))
    def test_top_k_agrees_with_a_full_sort(self, vectors, query, k):
        index = build(vectors)
        hits = top_k(index, query, k, "column")
        scores = {entry.id: cosine(query, entry.vector) for entry in index}
        self.assertEqual(len(hits), min(k, len(vectors)))
        returned = [score for _, score in hits]
        self.assertEqual(returned, sorted(returned, reverse=True))
        for entry_id, score in hits:
            self.assertAlmostEqual(score, scores[entry_id], places=9)
        left_out = [score for entry_id, score in scores.items() if entry_id not in dict(hits)]
        if left_out:
            self.assertGreaterEqual(min(returned) + 1e-9, max(left_out))
