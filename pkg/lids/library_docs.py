"""
Programming-library documentation: callable signatures and the library graph.

Documentation is read from ``<docs-dir>/<library>.json``; each file is a flat
array of entries ``{"path": ..., "params": [{"name", "default"?, "type"?}],
"returns"?}``. Default values are kept as Python literal text (``"100"``,
``"'gini'"``, ``"None"``) so they compare directly with call-site arguments.
"""
import json
import logging
from dataclasses import dataclass, field

from rdflib import Literal
from rdflib.namespace import RDF, RDFS

from .exceptions import CorpusIoError
from .serializers import LibraryEntrySerializer
from .vocabulary import IS_PART_OF, Classes, library_uri

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LibraryParameter:
    name: str
    default_value: str | None = None
    type_name: str | None = None


@dataclass(frozen=True)
class LibrarySignature:
    qualified_path: str
    parameters: tuple[LibraryParameter, ...] = ()
    return_type: str | None = None

    @property
    def parameter_names(self):
        return [p.name for p in self.parameters]

    @property
    def is_class(self):
        return self.qualified_path.rsplit(".", 1)[-1][:1].isupper()


def ancestors(qualified_path):
    """``a.b.c`` -> ``["a", "a.b"]``."""
    parts = qualified_path.split(".")
    return [".".join(parts[:i]) for i in range(1, len(parts))]


@dataclass
class DocIndex:
    signatures: dict[str, LibrarySignature] = field(default_factory=dict)
    # child path -> parent path, for every documented path and its ancestors
    parents: dict[str, str | None] = field(default_factory=dict)
    skipped: int = 0

    def add(self, signature):
        self.signatures[signature.qualified_path] = signature
        self._add_path(signature.qualified_path)

    def _add_path(self, path):
        chain = ancestors(path) + [path]
        for i, node in enumerate(chain):
            self.parents.setdefault(node, chain[i - 1] if i else None)

    def __len__(self):
        return len(self.signatures)

    def __contains__(self, qualified_path):
        return qualified_path in self.signatures

    def paths(self):
        return sorted(self.parents)


def _signature_from_entry(entry):
    return LibrarySignature(
        qualified_path=entry["path"],
        parameters=tuple(
            LibraryParameter(p["name"], p.get("default"), p.get("type"))
            for p in entry.get("params") or []
        ),
        return_type=entry.get("returns"),
    )


def load_library_docs(docs_dir):
    """Index every ``*.json`` documentation file in ``docs_dir``."""
    if not docs_dir.is_dir():
        raise CorpusIoError(f"documentation directory {docs_dir} is not readable")
    index = DocIndex()
    for doc_file in sorted(docs_dir.glob("*.json")):
        try:
            entries = json.loads(doc_file.read_text(encoding="utf-8"))
        except (OSError, ValueError) as exc:
            raise CorpusIoError(f"cannot read {doc_file}: {exc}") from exc
        if not isinstance(entries, list):
            logger.warning("%s is not a JSON array of entries; skipped", doc_file)
            index.skipped += 1
            continue
        for entry in entries:
            serializer = LibraryEntrySerializer(data=entry)
            if not serializer.is_valid():
                index.skipped += 1
                logger.warning("malformed entry in %s: %s", doc_file.name, serializer.errors)
                continue
            index.add(_signature_from_entry(serializer.validated_data))
    if index.skipped:
        logger.warning("%d malformed documentation entries skipped", index.skipped)
    logger.info("indexed %d documented callables from %s", len(index), docs_dir)
    return index


def resolve_call(index, qualified_path):
    """Exact-path lookup; None when the path is not documented."""
    return index.signatures.get(qualified_path)


def emit_library_graph(index, extra_paths=()):
    """Library nodes, labels and isPartOf edges for documented and used paths."""
    parents = dict(index.parents)
    for path in extra_paths:
        chain = ancestors(path) + [path]
        for i, node in enumerate(chain):
            parents.setdefault(node, chain[i - 1] if i else None)
    triples = []
    for path in sorted(parents):
        node = library_uri(path)
        triples.append((node, RDF.type, Classes.LIBRARY))
        triples.append((node, RDFS.label, Literal(path.rsplit(".", 1)[-1])))
        parent = parents[path]
        if parent is not None:
            triples.append((node, IS_PART_OF, library_uri(parent)))
    return triples
