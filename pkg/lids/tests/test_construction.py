import itertools
import json
import tempfile
from pathlib import Path

from django.test import SimpleTestCase
from hypothesis import given, settings as hsettings, strategies as st
from rdflib import Literal
from rdflib.namespace import RDF

from lids.construction import (
    SimilarityEdge, ThresholdConfig, assemble_graph, build_metadata_subgraph, candidate_pairs,
    column_similarity_worker, compute_similarity_edges, content_similarity, graph_statistics, greedy_matching,
    label_similarity, link_pipelines, table_relatedness, unique_profiles,
)
from lids.graph import DEFAULT_GRAPH
from lids.index import cosine
from lids.library_docs import DocIndex
from lids.trig import read_trig_star
from lids.vocabulary import (
    HAS_DATA_TYPE, HAS_TRUE_RATIO, IS_PART_OF, IS_UNIONABLE_WITH, READS, Classes, column_uri, statement_uri,
    table_uri,
)

from .factories import GOLDEN_DIR, doc_index, lexicon, make_profile, running_example_ir, titanic_store, unit_vector

DEFAULTS = ThresholdConfig()


def kinds(edges):
    return sorted(edge.kind for edge in edges)


class ThresholdTests(SimpleTestCase):
    def test_defaults(self):
        self.assertEqual((DEFAULTS.alpha, DEFAULTS.beta, DEFAULTS.theta, DEFAULTS.gamma), (0.75, 0.95, 0.90, 0.60))

    def test_range(self):
        with self.assertRaises(ValueError):
            ThresholdConfig(alpha=1.2)


class LabelSimilarityTests(SimpleTestCase):
    def test_synonyms_score_high(self):
        self.assertGreaterEqual(label_similarity("price", "cost", lexicon()), DEFAULTS.alpha)
        self.assertGreaterEqual(label_similarity("weight_kg", "mass_kg", lexicon()), DEFAULTS.alpha)

    def test_unrelated_words_score_low(self):
        self.assertLess(label_similarity("price", "weight", lexicon()), DEFAULTS.alpha)

    def test_edit_distance_fallback(self):
        self.assertAlmostEqual(label_similarity("abc1", "abc2", lexicon()), 0.75)
        self.assertEqual(label_similarity("Embarked", "Embarked", lexicon()), 1.0)

    @given(st.text(alphabet="abcxyz_ ", max_size=10), st.text(alphabet="abcxyz_ ", max_size=10))
    def test_symmetric_and_bounded(self, a, b):
        score = label_similarity(a, b, lexicon())
        self.assertEqual(score, label_similarity(b, a, lexicon()))
        self.assertTrue(0.0 <= score <= 1.0)


class ColumnSimilarityTests(SimpleTestCase):
    def test_boolean_true_ratios(self):
        a = make_profile("t1.csv", "flag_a", fgt="boolean", true_ratio=0.60)
        b = make_profile("t2.csv", "flag_b", fgt="boolean", true_ratio=0.58)
        self.assertAlmostEqual(content_similarity(a, b), 0.98)
        edges = column_similarity_worker(a, b, DEFAULTS, lexicon())
        self.assertIn("ContentSimilarity", kinds(edges))

    def test_distant_true_ratios(self):
        a = make_profile("t1.csv", "flag_a", fgt="boolean", true_ratio=0.6)
        b = make_profile("t2.csv", "flag_b", fgt="boolean", true_ratio=0.3)
        self.assertNotIn("ContentSimilarity", kinds(column_similarity_worker(a, b, DEFAULTS, lexicon())))

    def test_pkfk_needs_a_distinct_column(self):
        vector = unit_vector(1.0, 1.0)
        key = make_profile("t1.csv", "id", fgt="int", embedding=vector, total_count=10, distinct_count=10)
        ref = make_profile("t2.csv", "ref", fgt="int", embedding=vector, total_count=10, distinct_count=2)
        self.assertEqual(kinds(column_similarity_worker(key, ref, DEFAULTS, lexicon())),
                         ["ContentSimilarity", "PkFkSimilarity"])
        low = make_profile("t1.csv", "id", fgt="int", embedding=vector, total_count=10, distinct_count=2)
        self.assertEqual(kinds(column_similarity_worker(low, ref, DEFAULTS, lexicon())), ["ContentSimilarity"])

    def test_same_table_or_type_gives_nothing(self):
        a = make_profile("t1.csv", "price", fgt="int")
        self.assertEqual(column_similarity_worker(a, make_profile("t1.csv", "price", fgt="int"), DEFAULTS,
                                                  lexicon()), [])
        self.assertEqual(column_similarity_worker(a, make_profile("t2.csv", "price", fgt="float"), DEFAULTS,
                                                  lexicon()), [])

    def test_label_edge(self):
        a = make_profile("t1.csv", "price", fgt="float", embedding=unit_vector(1.0, 0.0))
        b = make_profile("t2.csv", "cost", fgt="float", embedding=unit_vector(0.0, 1.0))
        self.assertEqual(kinds(column_similarity_worker(a, b, DEFAULTS, lexicon())), ["LabelSimilarity"])


@st.composite
def corpora(draw):
    profiles = []
    for number in range(draw(st.integers(0, 12))):
        fgt = draw(st.sampled_from(["int", "boolean", "string"]))
        name = draw(st.sampled_from(["price", "cost", "age", "id", "Name", "abc1", "abc2"]))
        embedding = unit_vector(*draw(st.lists(st.integers(-2, 2), min_size=3, max_size=3)))
        profiles.append(make_profile(
            draw(st.sampled_from(["a.csv", "b.csv", "c.csv"])), f"{name}_{number}" if number % 3 else name,
            fgt=fgt, embedding=embedding, total_count=10, distinct_count=draw(st.integers(0, 10)),
            true_ratio=draw(st.floats(0, 1)) if fgt == "boolean" else None,
        ))
    return unique_profiles(profiles)


thresholds = st.builds(ThresholdConfig, *(st.floats(0, 1) for _ in range(4)))


def oracle_edges(profiles, config):
    """Nested loop over every ordered pair, applying the similarity rule directly."""
    found = set()
    for a, b in itertools.permutations(profiles, 2):
        if a.fgt != b.fgt or a.metadata.table_key == b.metadata.table_key:
            continue
        label = label_similarity(a.metadata.column, b.metadata.column, lexicon())
        if label >= config.alpha:
            found.add((str(a.metadata.column_uri), str(b.metadata.column_uri), "LabelSimilarity"))
        if a.fgt == "boolean":
            content, threshold = 1 - abs(a.stats.true_ratio - b.stats.true_ratio), config.beta
        else:
            content, threshold = max(0.0, cosine(a.embedding, b.embedding)), config.theta
        if min(content, 1.0) >= threshold:
            found.add((str(a.metadata.column_uri), str(b.metadata.column_uri), "ContentSimilarity"))
            if max(a.stats.distinct_ratio, b.stats.distinct_ratio) >= config.gamma:
                found.add((str(a.metadata.column_uri), str(b.metadata.column_uri), "PkFkSimilarity"))
    return found


class SimilarityEdgeTests(SimpleTestCase):
    @hsettings(max_examples=40, deadline=None)
    @given(corpora(), thresholds, st.integers(1, 5))
    def test_edges_match_a_nested_loop(self, profiles, config, partition_size):
        edges = compute_similarity_edges(profiles, config, lexicon(), partition_size=partition_size)
        self.assertEqual({(str(e.source), str(e.target), e.kind) for e in edges}, oracle_edges(profiles, config))
        self.assertTrue(all(0.0 <= e.score <= 1.0 for e in edges))

    @hsettings(max_examples=30, deadline=None)
    @given(corpora())
    def test_candidate_pairs_are_complete(self, profiles):
        expected = {
            (i, j) for i, j in itertools.combinations(range(len(profiles)), 2)
            if profiles[i].fgt == profiles[j].fgt and profiles[i].metadata.table_key != profiles[j].metadata.table_key
        }
        self.assertEqual(set(candidate_pairs(profiles)), expected)

    def test_process_pool_gives_the_same_edges(self):
        profiles = [
            make_profile("a.csv", "price", fgt="int", embedding=unit_vector(1.0, 0.1)),
            make_profile("b.csv", "cost", fgt="int", embedding=unit_vector(1.0, 0.0)),
            make_profile("c.csv", "fee", fgt="int", embedding=unit_vector(0.9, 0.2)),
        ]
        inline = compute_similarity_edges(profiles, DEFAULTS, lexicon(), workers=1, partition_size=1)
        pooled = compute_similarity_edges(profiles, DEFAULTS, lexicon(), workers=2, partition_size=1)
        self.assertEqual(inline, pooled)

    def test_edge_parts_are_written(self):
        profiles = [make_profile("a.csv", "price", fgt="int"), make_profile("b.csv", "cost", fgt="int")]
        with tempfile.TemporaryDirectory() as tmp:
            compute_similarity_edges(profiles, DEFAULTS, lexicon(), edges_dir=Path(tmp))
            records = json.loads((Path(tmp) / "part-00000.json").read_text())
        self.assertEqual([r["kind"] for r in records], ["LabelSimilarity"])


def brute_force_matching(scored_pairs):
    """Best total score over every one-to-one subset of the pairs."""
    best = 0.0
    for size in range(len(scored_pairs) + 1):
        for subset in itertools.combinations(scored_pairs, size):
            lefts, rights = [p[0] for p in subset], [p[1] for p in subset]
            if len(set(lefts)) == size and len(set(rights)) == size:
                best = max(best, sum(p[2] for p in subset))
    return best


class TableRelatednessTests(SimpleTestCase):
    def test_greedy_matching_is_one_to_one(self):
        matched = greedy_matching([("a1", "b1", 0.9), ("a1", "b2", 0.8), ("a2", "b1", 0.85), ("a2", "b2", 0.7)])
        self.assertEqual(matched, [("a1", "b1", 0.9), ("a2", "b2", 0.7)])

    @hsettings(max_examples=40, deadline=None)
    @given(st.lists(st.tuples(st.sampled_from("xyz"), st.sampled_from("uvw"), st.floats(0.01, 1)), max_size=7))
    def test_greedy_is_within_half_of_the_best(self, scored_pairs):
        matched = greedy_matching(scored_pairs)
        self.assertEqual(len({a for a, _, _ in matched}), len(matched))
        self.assertEqual(len({b for _, b, _ in matched}), len(matched))
        self.assertGreaterEqual(sum(s for _, _, s in matched) + 1e-9, brute_force_matching(scored_pairs) / 2)

    def test_union_and_join_scores(self):
        ta, tb = table_uri("lake", "ds", "a.csv"), table_uri("lake", "ds", "b.csv")
        a1, a2 = column_uri("lake", "ds", "a.csv", "x"), column_uri("lake", "ds", "a.csv", "y")
        b1, b2 = column_uri("lake", "ds", "b.csv", "x"), column_uri("lake", "ds", "b.csv", "y")
        edges = [
            SimilarityEdge(a1, b1, "LabelSimilarity", 0.9),
            SimilarityEdge(a2, b2, "ContentSimilarity", 0.8),
            SimilarityEdge(a1, b1, "PkFkSimilarity", 0.95),
        ]
        edges += [edge.reversed() for edge in edges]
        relations = {r.kind: r for r in table_relatedness(edges, {ta: [a1, a2], tb: [b1, b2]})}
        self.assertAlmostEqual(relations["union"].score, 0.85)
        self.assertAlmostEqual(relations["join"].score, 0.475)
        self.assertEqual((relations["union"].table_a, relations["union"].table_b), (ta, tb))

    def test_three_tables_rank_by_matching(self):
        tables = {table_uri("lake", "ds", t): [column_uri("lake", "ds", t, c) for c in ("x", "y")]
                  for t in ("a.csv", "b.csv", "c.csv")}
        edges = [
            SimilarityEdge(column_uri("lake", "ds", "a.csv", "x"), column_uri("lake", "ds", "b.csv", "x"), "LabelSimilarity", 1.0),
            SimilarityEdge(column_uri("lake", "ds", "a.csv", "y"), column_uri("lake", "ds", "b.csv", "y"), "LabelSimilarity", 1.0),
            SimilarityEdge(column_uri("lake", "ds", "a.csv", "x"), column_uri("lake", "ds", "c.csv", "y"), "ContentSimilarity", 0.92),
        ]
        relations = sorted(table_relatedness(edges, tables), key=lambda r: -r.score)
        self.assertEqual([(r.table_b, round(r.score, 2)) for r in relations],
                         [(table_uri("lake", "ds", "b.csv"), 1.0), (table_uri("lake", "ds", "c.csv"), 0.46)])


class GraphAssemblyTests(SimpleTestCase):
    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.store, cls.index = titanic_store()

    def test_metadata_subgraph(self):
        profile = make_profile("t.csv", "flag", fgt="boolean", true_ratio=0.25, source="lake", dataset="ds")
        triples = build_metadata_subgraph(profile)
        column = profile.metadata.column_uri
        self.assertIn((column, HAS_DATA_TYPE, Literal("boolean")), triples)
        self.assertIn((column, HAS_TRUE_RATIO, Literal(0.25)), triples)
        self.assertIn((column, IS_PART_OF, table_uri("lake", "ds", "t.csv")), triples)

    def test_reads_edges(self):
        graph = "http://kglids.org/resource/kaggle/titanic/rf-baseline"
        reads = {(str(at.triple.subject), str(at.triple.object)) for g, at in self.store.match(None, READS, None)
                 if str(g) == graph}
        statements = [str(statement_uri("kaggle", "titanic", "rf-baseline", i)) for i in range(14)]
        self.assertIn((statements[4], str(table_uri("kaggle", "titanic", "train.csv"))), reads)
        self.assertIn((statements[8], str(column_uri("kaggle", "titanic", "train.csv", "Survived"))), reads)
        self.assertFalse([r for r in reads if r[1].endswith("NormalizedAge")])

    def test_train_and_test_are_unionable(self):
        train, test = table_uri("kaggle", "titanic", "train.csv"), table_uri("kaggle", "titanic", "test.csv")
        self.assertTrue(self.store.holds((train, IS_UNIONABLE_WITH, test)))
        self.assertAlmostEqual(self.store.certainty((train, IS_UNIONABLE_WITH, test)), 1.0)
        self.assertEqual(self.store.certainty((train, IS_UNIONABLE_WITH, test)),
                         self.store.certainty((test, IS_UNIONABLE_WITH, train)))

    def test_every_table_is_indexed(self):
        self.assertEqual(len(self.index.entries(kind="table")), 2)
        self.assertEqual(len(self.index.entries(kind="dataset")), 1)
        self.assertEqual(len(self.index.entries(kind="column")), 15)

    def test_statistics(self):
        golden = json.loads((GOLDEN_DIR / "titanic_statistics.json").read_text(encoding="utf-8"))
        counts = graph_statistics(self.store)
        self.assertEqual(len(golden), 10)
        self.assertEqual({category: counts[category] for category in golden}, golden)
        self.assertEqual(sum(counts.values()), len(self.store))

    def test_two_tables_and_one_pipeline_match_the_golden_graph(self):
        profiles = [
            make_profile("train.csv", "Age", fgt="int", source="kaggle", dataset="titanic",
                         min_value=22.0, max_value=38.0, mean_value=30.0),
            make_profile("train.csv", "Name", fgt="string", source="kaggle", dataset="titanic",
                         min_length=4, max_length=12, mean_length=8.0),
            make_profile("test.csv", "Fare", fgt="float", source="kaggle", dataset="titanic",
                         min_value=7.25, max_value=71.2833, mean_value=39.25),
        ]
        store, _ = assemble_graph(profiles, [running_example_ir()], DocIndex(), DEFAULTS, lexicon())
        self.assertEqual(store, read_trig_star(GOLDEN_DIR / "two_tables.trig"))

    def test_duplicate_profiles_give_the_same_graph(self):
        profiles = [make_profile("a.csv", "price"), make_profile("b.csv", "cost")]
        once, _ = assemble_graph(profiles, [], DocIndex(), DEFAULTS, lexicon())
        twice, _ = assemble_graph(profiles + profiles, [], DocIndex(), DEFAULTS, lexicon())
        self.assertEqual(once, twice)

    def test_empty_corpus(self):
        store, index = assemble_graph([], [], DocIndex(), DEFAULTS, lexicon())
        self.assertEqual(len(store), 0)
        self.assertEqual(len(index), 0)

    def test_pipeline_without_schema_has_no_reads(self):
        store, _ = assemble_graph([], [running_example_ir()], doc_index(), DEFAULTS, lexicon())
        self.assertEqual(link_pipelines([running_example_ir()], store),
                         {store.named_graphs[0]: []})
        self.assertTrue(store.match(None, RDF.type, Classes.LIBRARY, graph=DEFAULT_GRAPH))
