"""
LiDS ontology terms and the resource URI scheme.

Terms live under ``http://kglids.org/ontology/`` (with ``data/`` and
``pipeline/`` sub-namespaces); instances live under
``http://kglids.org/resource/``. Every node in the graph is a ground IRI.
"""
from urllib.parse import quote, unquote

from rdflib import Namespace, URIRef
from rdflib.namespace import RDF, RDFS, XSD

from .exceptions import InvalidName

ONTOLOGY = "http://kglids.org/ontology/"
RESOURCE = "http://kglids.org/resource/"

KGLIDS = Namespace(ONTOLOGY)
DATA = Namespace(ONTOLOGY + "data/")
PIPELINE = Namespace(ONTOLOGY + "pipeline/")

# Fixed order; the serializer writes the prefixes exactly like this.
PREFIXES = (
    ("kglids", KGLIDS),
    ("data", DATA),
    ("pipeline", PIPELINE),
    ("rdf", Namespace(str(RDF))),
    ("rdfs", Namespace(str(RDFS))),
    ("xsd", Namespace(str(XSD))),
)


class Classes:
    SOURCE = KGLIDS.Source
    DATASET = KGLIDS.Dataset
    TABLE = KGLIDS.Table
    COLUMN = KGLIDS.Column
    PIPELINE = KGLIDS.Pipeline
    STATEMENT = KGLIDS.Statement
    LIBRARY = KGLIDS.Library


# annotation predicate for RDF-star certainty scores
CERTAINTY = KGLIDS.certainty

# data global schema
HAS_LABEL_SIMILARITY = DATA.hasLabelSimilarity
HAS_CONTENT_SIMILARITY = DATA.hasContentSimilarity
HAS_PKFK_SIMILARITY = DATA.hasPrimaryKeyForeignKeySimilarity
IS_UNIONABLE_WITH = DATA.isUnionableWith
IS_JOINABLE_WITH = DATA.isJoinableWith
IS_PART_OF = DATA.isPartOf
HAS_TOTAL_VALUE_COUNT = DATA.hasTotalValueCount
HAS_DISTINCT_VALUE_COUNT = DATA.hasDistinctValueCount
HAS_MISSING_VALUE_COUNT = DATA.hasMissingValueCount
HAS_DATA_TYPE = DATA.hasDataType
HAS_TRUE_RATIO = DATA.hasTrueRatio
HAS_MIN_VALUE = DATA.hasMinValue
HAS_MAX_VALUE = DATA.hasMaxValue
HAS_MEAN_VALUE = DATA.hasMeanValue
HAS_MIN_LENGTH = DATA.hasMinLength
HAS_MAX_LENGTH = DATA.hasMaxLength
HAS_MEAN_LENGTH = DATA.hasMeanLength

# pipelines
HAS_DATA_FLOW_TO = PIPELINE.hasDataFlowTo
HAS_NEXT_STATEMENT = PIPELINE.hasNextStatement
CALLS_LIBRARY = PIPELINE.callsLibrary
READS = PIPELINE.reads
IN_CONTROL_FLOW = PIPELINE.inControlFlow
HAS_PARAMETER = PIPELINE.hasParameter
HAS_TEXT = PIPELINE.hasText
HAS_DATASET = PIPELINE.hasDataset
HAS_AUTHOR = PIPELINE.hasAuthor
HAS_SCORE = PIPELINE.hasScore
HAS_TAG = PIPELINE.hasTag
HAS_URL = PIPELINE.hasUrl

SIMILARITY_PREDICATES = {
    "LabelSimilarity": HAS_LABEL_SIMILARITY,
    "ContentSimilarity": HAS_CONTENT_SIMILARITY,
    "PkFkSimilarity": HAS_PKFK_SIMILARITY,
}


def make_resource_uri(parts):
    """Join percent-encoded path segments under the resource prefix."""
    parts = list(parts)
    if not parts:
        raise InvalidName("a resource URI needs at least one path segment")
    encoded = []
    for part in parts:
        part = str(part)
        if not part:
            raise InvalidName(f"empty path segment in {parts!r}")
        encoded.append(quote(part, safe=""))
    return URIRef(RESOURCE + "/".join(encoded))


def library_uri(qualified_path):
    return make_resource_uri(["library", *qualified_path.split(".")])


def library_path(uri):
    """Inverse of ``library_uri``; None for non-library resources."""
    prefix = RESOURCE + "library/"
    text = str(uri)
    if not text.startswith(prefix):
        return None
    return ".".join(unquote(part) for part in text[len(prefix):].split("/"))


def source_uri(source):
    return make_resource_uri([source])


def dataset_uri(source, dataset):
    return make_resource_uri([source, dataset])


def table_uri(source, dataset, table):
    return make_resource_uri([source, dataset, table])


def column_uri(source, dataset, table, column):
    return make_resource_uri([source, dataset, table, column])


def pipeline_uri(source, dataset, pipeline_id):
    return make_resource_uri([source, dataset, pipeline_id])


def statement_uri(source, dataset, pipeline_id, index):
    return make_resource_uri([source, dataset, pipeline_id, f"s{index}"])
