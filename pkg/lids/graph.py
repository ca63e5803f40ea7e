"""
In-memory RDF-star store for the LiDS graph.

The store holds a default graph plus named graphs. Each triple may carry a
certainty annotation (a score in [0, 1]). Terms are rdflib terms; there are
no blank nodes.
"""
from collections import defaultdict
from dataclasses import dataclass
from typing import NamedTuple

from rdflib import BNode, Literal, URIRef

# Key of the default graph inside the store.
DEFAULT_GRAPH = None


class _AnyGraph:
    def __repr__(self):
        return "ANY_GRAPH"


ANY_GRAPH = _AnyGraph()


class Triple(NamedTuple):
    subject: URIRef
    predicate: URIRef
    object: URIRef | Literal


@dataclass(frozen=True)
class AnnotatedTriple:
    triple: Triple
    certainty: float | None = None


def term_key(term):
    """Lexicographic sort key of a term (its N-Triples form)."""
    return term.n3()


def graph_key(graph):
    return "" if graph is DEFAULT_GRAPH else str(graph)


def quad_key(graph, triple):
    return (graph_key(graph), term_key(triple.subject), term_key(triple.predicate), term_key(triple.object))


class GraphStore:
    """Default graph + named graphs, pattern-matchable.

    Single writer while building; concurrent reads are safe once built.
    """

    def __init__(self):
        self._graphs: dict = {DEFAULT_GRAPH: {}}
        self._by_subject = defaultdict(set)
        self._by_predicate = defaultdict(set)
        self._by_object = defaultdict(set)

    def __len__(self):
        return sum(len(triples) for triples in self._graphs.values())

    def __iter__(self):
        """Yield (graph, AnnotatedTriple) in match order."""
        return iter(self.match())

    def __eq__(self, other):
        if not isinstance(other, GraphStore):
            return NotImplemented
        return self.as_set() == other.as_set()

    def as_set(self):
        return {
            (graph, triple, certainty)
            for graph, triples in self._graphs.items()
            for triple, certainty in triples.items()
        }

    @property
    def named_graphs(self):
        return sorted((g for g in self._graphs if g is not DEFAULT_GRAPH), key=str)

    def add(self, triple, graph=DEFAULT_GRAPH, certainty=None):
        triple = Triple(*triple)
        for term in triple:
            if isinstance(term, BNode):
                raise ValueError(f"blank nodes are not allowed: {triple}")
        if certainty is not None:
            certainty = float(certainty)
            if not 0.0 <= certainty <= 1.0:
                raise ValueError(f"certainty {certainty} outside [0, 1]")
        triples = self._graphs.setdefault(graph, {})
        if triple in triples:
            if certainty is not None:
                triples[triple] = certainty
            return
        triples[triple] = certainty
        quad = (graph, triple)
        self._by_subject[triple.subject].add(quad)
        self._by_predicate[triple.predicate].add(quad)
        self._by_object[triple.object].add(quad)

    def add_all(self, triples, graph=DEFAULT_GRAPH):
        """Insert (triple, certainty) pairs or bare triples."""
        for item in triples:
            if isinstance(item, AnnotatedTriple):
                self.add(item.triple, graph, item.certainty)
            elif len(item) == 2:
                self.add(item[0], graph, item[1])
            else:
                self.add(item, graph)

    def update(self, other):
        """Merge another store into this one."""
        for graph, triples in other._graphs.items():
            for triple, certainty in triples.items():
                self.add(triple, graph, certainty)

    def certainty(self, triple, graph=DEFAULT_GRAPH):
        return self._graphs.get(graph, {}).get(Triple(*triple))

    def __contains__(self, triple):
        triple = Triple(*triple)
        return any(triple in triples for triples in self._graphs.values())

    def holds(self, triple, graph=DEFAULT_GRAPH):
        return Triple(*triple) in self._graphs.get(graph, {})

    def _candidates(self, s, p, o, graph):
        pools = []
        if s is not None:
            pools.append(self._by_subject.get(s, set()))
        if o is not None:
            pools.append(self._by_object.get(o, set()))
        if p is not None:
            pools.append(self._by_predicate.get(p, set()))
        if pools:
            return min(pools, key=len)
        if graph is ANY_GRAPH:
            return [(g, t) for g, triples in self._graphs.items() for t in triples]
        return [(graph, t) for t in self._graphs.get(graph, {})]

    def match(self, s=None, p=None, o=None, graph=ANY_GRAPH):
        """All (graph, AnnotatedTriple) matching the pattern; None is a wildcard.

        ``graph=ANY_GRAPH`` matches every graph, ``graph=DEFAULT_GRAPH`` only
        the default graph.
        """
        found = []
        for g, triple in self._candidates(s, p, o, graph):
            if graph is not ANY_GRAPH and g != graph:
                continue
            if s is not None and triple.subject != s:
                continue
            if p is not None and triple.predicate != p:
                continue
            if o is not None and triple.object != o:
                continue
            found.append((g, triple))
        found.sort(key=lambda quad: quad_key(*quad))
        return [(g, AnnotatedTriple(t, self._graphs[g][t])) for g, t in found]

    # convenience accessors used by construction and queries

    def objects(self, s, p, graph=ANY_GRAPH):
        return [at.triple.object for _, at in self.match(s, p, None, graph)]

    def subjects(self, p, o, graph=ANY_GRAPH):
        return [at.triple.subject for _, at in self.match(None, p, o, graph)]

    def value(self, s, p, graph=ANY_GRAPH, default=None):
        values = self.objects(s, p, graph)
        return values[0] if values else default

    def graph_triples(self, graph):
        return [at for _, at in self.match(graph=graph)]


def add_triple(store, graph, triple, certainty=None):
    store.add(triple, graph, certainty)


def match(store, pattern):
    s, p, o, graph = pattern
    return store.match(s, p, o, graph)
