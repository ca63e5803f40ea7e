from django.test import SimpleTestCase
from hypothesis import given, settings as hsettings, strategies as st
from rdflib import BNode, Literal, URIRef
from rdflib.namespace import RDF, RDFS

from lids.exceptions import InvalidName, TrigSyntaxError
from lids.graph import ANY_GRAPH, DEFAULT_GRAPH, GraphStore
from lids.trig import format_certainty, parse_trig_star, serialize_ntriples, serialize_trig_star
from lids.vocabulary import (
    CERTAINTY, HAS_LABEL_SIMILARITY, Classes, column_uri, library_path, library_uri, make_resource_uri,
    statement_uri,
)

from .factories import titanic_store

SEGMENT = st.text(alphabet="abcXYZ09_-. é/", min_size=1, max_size=8)
IDENTIFIER = st.from_regex(r"[a-z_][a-z0-9_]{0,6}", fullmatch=True)
TEXT = st.text(alphabet='abc XYZ\n\r\t"\\é=\x01\x0b\x0c\x1c\x1d\x1e\x7f\x85\u2028\u2029', max_size=12)
DOUBLE = st.floats(allow_nan=False, allow_infinity=False)


class ResourceUriTests(SimpleTestCase):
    def test_column_uri(self):
        self.assertEqual(
            str(column_uri("kaggle", "titanic", "train.csv", "Age")),
            "http://kglids.org/resource/kaggle/titanic/train.csv/Age",
        )

    def test_segments_are_percent_encoded(self):
        self.assertEqual(
            str(column_uri("kaggle", "my data", "a/b.csv", "Ticket Fare")),
            "http://kglids.org/resource/kaggle/my%20data/a%2Fb.csv/Ticket%20Fare",
        )

    def test_empty_segment_is_rejected(self):
        with self.assertRaises(InvalidName):
            column_uri("kaggle", "", "train.csv", "Age")
        with self.assertRaises(InvalidName):
            make_resource_uri([])

    def test_statement_uri(self):
        self.assertTrue(str(statement_uri("kaggle", "titanic", "p1", 3)).endswith("/kaggle/titanic/p1/s3"))

    @given(st.lists(SEGMENT, min_size=1, max_size=4), st.lists(SEGMENT, min_size=1, max_size=4))
    def test_distinct_segments_give_distinct_uris(self, a, b):
        if a != b:
            self.assertNotEqual(make_resource_uri(a), make_resource_uri(b))

    @given(st.lists(IDENTIFIER, min_size=1, max_size=5))
    def test_library_path_inverts_library_uri(self, parts):
        path = ".".join(parts)
        self.assertEqual(library_path(library_uri(path)), path)

    def test_library_path_of_other_resource(self):
        self.assertIsNone(library_path(column_uri("kaggle", "titanic", "train.csv", "Age")))


class GraphStoreTests(SimpleTestCase):
    def setUp(self):
        self.a = URIRef("http://example.org/a")
        self.b = URIRef("http://example.org/b")
        self.g = URIRef("http://example.org/g")

    def test_add_is_idempotent(self):
        store = GraphStore()
        store.add((self.a, RDF.type, Classes.TABLE))
        store.add((self.a, RDF.type, Classes.TABLE))
        self.assertEqual(len(store), 1)

    def test_certainty_is_kept_and_updated(self):
        store = GraphStore()
        triple = (self.a, HAS_LABEL_SIMILARITY, self.b)
        store.add(triple, certainty=0.8)
        store.add(triple)
        self.assertEqual(store.certainty(triple), 0.8)
        store.add(triple, certainty=0.9)
        self.assertEqual(store.certainty(triple), 0.9)

    def test_certainty_outside_unit_interval(self):
        with self.assertRaises(ValueError):
            GraphStore().add((self.a, HAS_LABEL_SIMILARITY, self.b), certainty=1.5)

    def test_blank_nodes_are_rejected(self):
        with self.assertRaises(ValueError):
            GraphStore().add((BNode(), RDF.type, Classes.TABLE))

    def test_match_scopes_graphs(self):
        store = GraphStore()
        store.add((self.a, RDFS.label, Literal("a")))
        store.add((self.b, RDFS.label, Literal("b")), self.g)
        self.assertEqual(len(store.match(None, RDFS.label, None)), 2)
        self.assertEqual(len(store.match(None, RDFS.label, None, graph=DEFAULT_GRAPH)), 1)
        self.assertEqual([g for g, _ in store.match(graph=self.g)], [self.g])
        self.assertEqual(store.named_graphs, [self.g])
        self.assertIn((self.b, RDFS.label, Literal("b")), store)
        self.assertFalse(store.holds((self.b, RDFS.label, Literal("b"))))

    def test_match_order_is_lexicographic(self):
        store = GraphStore()
        for name in ("c", "a", "b"):
            store.add((URIRef(f"http://example.org/{name}"), RDF.type, Classes.TABLE))
        subjects = [str(at.triple.subject) for _, at in store.match(graph=ANY_GRAPH)]
        self.assertEqual(subjects, sorted(subjects))


@st.composite
def stores(draw):
    store = GraphStore()
    nodes = [URIRef(f"http://example.org/{name}") for name in draw(st.lists(IDENTIFIER, min_size=1, max_size=4))]
    nodes.append(Classes.COLUMN)
    graphs = [DEFAULT_GRAPH, URIRef("http://example.org/graph/1"), URIRef("http://example.org/graph/2")]
    for _ in range(draw(st.integers(0, 12))):
        subject = draw(st.sampled_from(nodes))
        predicate = draw(st.sampled_from([RDF.type, RDFS.label, HAS_LABEL_SIMILARITY]))
        obj = draw(st.one_of(st.sampled_from(nodes), TEXT.map(Literal), st.integers(0, 99).map(Literal),
                              DOUBLE.map(Literal)))
        certainty = draw(st.one_of(st.none(), st.floats(0.0, 1.0)))
        store.add((subject, predicate, obj), draw(st.sampled_from(graphs)), certainty)
    return store


class TrigStarTests(SimpleTestCase):
    @hsettings(max_examples=1000, deadline=None)
    @given(stores())
    def test_round_trip(self, store):
        self.assertEqual(parse_trig_star(serialize_trig_star(store)), store)

    def test_line_breaks_inside_literals(self):
        subject = URIRef("http://example.org/a")
        for char in "\x0b\x0c\x1c\x1d\x1e\x85\u2028\u2029\r\n":
            with self.subTest(char=hex(ord(char))):
                store = GraphStore()
                store.add((subject, RDFS.label, Literal(f"a{char}b")), URIRef("http://example.org/g"))
                text = serialize_trig_star(store)
                self.assertEqual(len(text.splitlines()), len(text.split("\n")) - 1)
                self.assertEqual(parse_trig_star(text), store)

    def test_titanic_graph_round_trip(self):
        store, _ = titanic_store()
        text = serialize_trig_star(store)
        self.assertEqual(parse_trig_star(text), store)
        self.assertEqual(serialize_trig_star(parse_trig_star(text)), text)

    def test_annotation_follows_its_triple(self):
        store = GraphStore()
        a, b = URIRef("http://example.org/a"), URIRef("http://example.org/b")
        store.add((a, HAS_LABEL_SIMILARITY, b), certainty=0.95)
        lines = serialize_trig_star(store).splitlines()
        position = lines.index("<http://example.org/a> data:hasLabelSimilarity <http://example.org/b> .")
        self.assertEqual(
            lines[position + 1],
            '<< <http://example.org/a> data:hasLabelSimilarity <http://example.org/b> >> '
            'kglids:certainty "0.95"^^xsd:double .',
        )

    def test_empty_store_is_prefixes_only(self):
        text = serialize_trig_star(GraphStore())
        self.assertTrue(all(line.startswith("@prefix") for line in text.splitlines() if line))
        self.assertEqual(len(parse_trig_star(text)), 0)

    def test_certainty_formatting(self):
        self.assertEqual(format_certainty(0.9), "0.90")
        self.assertEqual(format_certainty(1.0), "1.00")
        self.assertEqual(float(format_certainty(0.123456789)), 0.123456789)

    def test_malformed_annotation_reports_its_line(self):
        with self.assertRaises(TrigSyntaxError) as raised:
            parse_trig_star("@prefix kglids: <http://kglids.org/ontology/> .\n<< broken\n")
        self.assertEqual(raised.exception.line, 2)

    def test_annotation_of_unasserted_triple(self):
        text = (
            f'<< <http://example.org/a> <http://example.org/p> <http://example.org/b> >> '
            f'<{CERTAINTY}> "0.5"^^xsd:double .\n'
        )
        with self.assertRaises(TrigSyntaxError):
            parse_trig_star(text)

    def test_bad_trig_body(self):
        with self.assertRaises(TrigSyntaxError):
            parse_trig_star("<http://example.org/a> <http://example.org/p> .\n")

    def test_ntriples_cover_the_default_graph_only(self):
        store = GraphStore()
        a = URIRef("http://example.org/a")
        store.add((a, RDFS.label, Literal("default")))
        store.add((a, RDFS.label, Literal("named")), URIRef("http://example.org/g"))
        lines = serialize_ntriples(store).splitlines()
        self.assertEqual(lines, ['<http://example.org/a> <http://www.w3.org/2000/01/rdf-schema#label> "default" .'])
