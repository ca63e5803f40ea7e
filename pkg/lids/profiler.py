"""
Column profiling: fine-grained type, statistics and a 300-d embedding per
column, plus the table and dataset embeddings built from them.

A table or dataset embedding concatenates, for every fine-grained type in
``FINE_GRAINED_TYPES`` order, the mean embedding of its columns of that type
(a zero block when the table has none).
"""
import json
import logging
import zlib
from dataclasses import asdict, dataclass, field
from enum import Enum
from pathlib import Path
from urllib.parse import quote

import numpy as np
import pandas as pd

from .embeddings import EMBEDDING_DIM, DefaultEmbedder
from .exceptions import CorpusIoError
from .values import (
    is_boolean_token, is_float, is_int, is_missing, is_true, parse_dates, to_numbers, words,
)
from .vocabulary import column_uri

logger = logging.getLogger(__name__)


class FineGrainedType(str, Enum):
    INT = "int"
    FLOAT = "float"
    BOOLEAN = "boolean"
    DATE = "date"
    NAMED_ENTITY = "named_entity"
    NATURAL_LANGUAGE_TEXT = "natural_language_text"
    STRING = "string"


FINE_GRAINED_TYPES = tuple(t.value for t in FineGrainedType)
TABLE_EMBEDDING_DIM = EMBEDDING_DIM * len(FINE_GRAINED_TYPES)

DEFAULT_SAMPLE_SIZE = 1000
DEFAULT_VOTE_SHARE = 0.6
DEFAULT_LEXICON_SHARE = 0.7
DEFAULT_MIN_TOKENS = 3


@dataclass(frozen=True)
class ColumnMetadata:
    source: str
    dataset: str
    table: str
    column: str

    @property
    def column_uri(self):
        return column_uri(self.source, self.dataset, self.table, self.column)

    @property
    def table_key(self):
        return (self.source, self.dataset, self.table)


@dataclass
class ColumnStats:
    total_count: int = 0
    distinct_count: int = 0
    missing_count: int = 0
    min_value: float | None = None
    max_value: float | None = None
    mean_value: float | None = None
    true_ratio: float | None = None
    min_length: int | None = None
    max_length: int | None = None
    mean_length: float | None = None

    @property
    def non_missing_count(self):
        return self.total_count - self.missing_count

    @property
    def distinct_ratio(self):
        present = self.non_missing_count
        return self.distinct_count / present if present else 0.0


@dataclass
class ColumnProfile:
    metadata: ColumnMetadata
    fgt: str
    stats: ColumnStats
    embedding: np.ndarray = field(default_factory=lambda: np.zeros(EMBEDDING_DIM))

    def to_dict(self):
        metadata = asdict(self.metadata)
        metadata["column_uri"] = str(self.metadata.column_uri)
        return {
            "metadata": metadata,
            "fgt": self.fgt,
            "stats": asdict(self.stats),
            "embedding": [float(x) for x in self.embedding],
        }

    @classmethod
    def from_dict(cls, data):
        meta = data["metadata"]
        return cls(
            metadata=ColumnMetadata(meta["source"], meta["dataset"], meta["table"], meta["column"]),
            fgt=data["fgt"],
            stats=ColumnStats(**data["stats"]),
            embedding=np.asarray(data["embedding"], dtype=float),
        )


def sample_values(values, size=DEFAULT_SAMPLE_SIZE):
    """First ``size`` non-missing values in content-hash order, independent of row order."""
    present = [str(value).strip() for value in values if not is_missing(value)]
    present.sort(key=lambda value: (zlib.crc32(value.encode("utf-8")), value))
    return present[:size]


def _reaches(count, total, share):
    return total > 0 and count / total >= share


def _is_sentence(value, word_lexicon, lexicon_share, min_tokens):
    tokens = words(value)
    if len(tokens) < min_tokens:
        return False
    return _reaches(sum(token in word_lexicon for token in tokens), len(tokens), lexicon_share)


def infer_fine_grained_type(values, word_lexicon, gazetteer, vote_share=DEFAULT_VOTE_SHARE,
                            lexicon_share=DEFAULT_LEXICON_SHARE, min_tokens=DEFAULT_MIN_TOKENS):
    values = [str(value).strip() for value in values if not is_missing(value)]
    total = len(values)
    if not total:
        return FineGrainedType.STRING
    if set(values) <= {"0", "1"} or _reaches(sum(map(is_boolean_token, values)), total, vote_share):
        return FineGrainedType.BOOLEAN
    if _reaches(sum(map(is_int, values)), total, vote_share):
        return FineGrainedType.INT
    if _reaches(sum(map(is_float, values)), total, vote_share):
        return FineGrainedType.FLOAT
    if _reaches(int(parse_dates(values).notna().sum()), total, vote_share):
        return FineGrainedType.DATE
    if _reaches(sum(value in gazetteer for value in values), total, vote_share):
        return FineGrainedType.NAMED_ENTITY
    sentences = sum(_is_sentence(value, word_lexicon, lexicon_share, min_tokens) for value in values)
    if _reaches(sentences, total, vote_share):
        return FineGrainedType.NATURAL_LANGUAGE_TEXT
    return FineGrainedType.STRING


def collect_stats(values, fgt):
    """Exact statistics over the full column; missing cells count toward the total."""
    values = list(values)
    present = [str(value).strip() for value in values if not is_missing(value)]
    stats = ColumnStats(
        total_count=len(values),
        distinct_count=len(set(present)),
        missing_count=len(values) - len(present),
    )
    fgt = FineGrainedType(fgt)
    if fgt in (FineGrainedType.INT, FineGrainedType.FLOAT):
        numbers = to_numbers(present)
        numbers = numbers[np.isfinite(numbers)]
        if numbers.size:
            stats.min_value = float(numbers.min())
            stats.max_value = float(numbers.max())
            stats.mean_value = float(numbers.mean())
    elif fgt is FineGrainedType.BOOLEAN:
        stats.true_ratio = sum(map(is_true, present)) / len(present) if present else 0.0
    elif present:
        lengths = np.array([len(value) for value in present])
        stats.min_length = int(lengths.min())
        stats.max_length = int(lengths.max())
        stats.mean_length = float(lengths.mean())
    return stats


def embed_column(values, fgt, embedder, sample_size=DEFAULT_SAMPLE_SIZE):
    """Mean value embedding over the sample; the zero vector for an empty column."""
    sample = sample_values(values, sample_size)
    matrix = embedder.embed_values(sample, FineGrainedType(fgt).value) if sample else None
    if matrix is None or len(matrix) == 0:
        return np.zeros(embedder.dim)
    return matrix.mean(axis=0)


@dataclass
class ProfilerContext:
    """Everything a profiling worker needs; shared read-only."""

    word_lexicon: object
    gazetteer: object
    embedder: object = field(default_factory=DefaultEmbedder)
    sample_size: int = DEFAULT_SAMPLE_SIZE
    vote_share: float = DEFAULT_VOTE_SHARE
    lexicon_share: float = DEFAULT_LEXICON_SHARE
    min_tokens: int = DEFAULT_MIN_TOKENS


def profile_column(metadata, values, context):
    values = list(values)
    sample = sample_values(values, context.sample_size)
    fgt = infer_fine_grained_type(sample, context.word_lexicon, context.gazetteer, context.vote_share,
                                  context.lexicon_share, context.min_tokens)
    return ColumnProfile(
        metadata=metadata,
        fgt=fgt.value,
        stats=collect_stats(values, fgt),
        embedding=embed_column(values, fgt, context.embedder, context.sample_size),
    )


def read_table(path):
    """Every cell as text; empty cells stay empty strings (missing)."""
    try:
        return pd.read_csv(path, dtype=str, keep_default_na=False, encoding="utf-8")
    except pd.errors.EmptyDataError:
        return pd.DataFrame()
    except (OSError, UnicodeDecodeError, pd.errors.ParserError) as exc:
        raise CorpusIoError(f"cannot read table {path}: {exc}") from exc


def profile_table(path, source, dataset, context):
    frame = read_table(path)
    return [
        profile_column(ColumnMetadata(source, dataset, Path(path).name, str(name)), frame[name].tolist(), context)
        for name in frame.columns
    ]


def profile_path(out_dir, metadata):
    return (Path(out_dir) / metadata.source / metadata.dataset / metadata.table
            / f"{quote(metadata.column, safe='')}.profile.json")


def write_profile(profile, out_dir):
    path = profile_path(out_dir, profile.metadata)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(profile.to_dict(), indent=1, sort_keys=True), encoding="utf-8")
    return path


def embed_table(profiles):
    blocks = []
    for fgt in FINE_GRAINED_TYPES:
        vectors = [np.asarray(p.embedding, dtype=float) for p in profiles if p.fgt == fgt]
        blocks.append(np.mean(vectors, axis=0) if vectors else np.zeros(EMBEDDING_DIM))
    return np.concatenate(blocks)


def embed_dataset(tables):
    """``tables``: one list of column profiles per table."""
    vectors = [embed_table(profiles) for profiles in tables]
    return np.mean(vectors, axis=0) if vectors else np.zeros(TABLE_EMBEDDING_DIM)


def group_by_table(profiles):
    tables: dict[tuple, list] = {}
    for profile in profiles:
        tables.setdefault(profile.metadata.table_key, []).append(profile)
    return tables
