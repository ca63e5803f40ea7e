"""
Word lexicon, gazetteer and the default column-value embedder.

The default embedder is deterministic and seed-derived: textual values are
hashed into character trigram counts and projected to 300 dimensions by a
fixed random sign matrix; numeric and date values go through fixed random
Fourier features of their z-score within the column. Any object with an
``embed_values(values, fgt)`` method returning an ``(n, 300)`` array can
replace it.
"""
import csv
import logging
import zlib
from functools import lru_cache

import numpy as np
import pandas as pd

from .exceptions import CorpusIoError
from .values import days_since_epoch, to_numbers

logger = logging.getLogger(__name__)

EMBEDDING_DIM = 300
TRIGRAM_BUCKETS = 2 ** 15
NUMERIC_TYPES = ("int", "float")


class WordLexicon:
    """GloVe-style token -> vector table."""

    def __init__(self, vectors=None):
        self.vectors: dict[str, np.ndarray] = dict(vectors or {})

    def __contains__(self, token):
        return token in self.vectors

    def __len__(self):
        return len(self.vectors)

    def get(self, token):
        return self.vectors.get(token)

    def mean_vector(self, tokens):
        found = [self.vectors[token] for token in tokens if token in self.vectors]
        if not found:
            return None
        return np.mean(found, axis=0)

    @classmethod
    def load(cls, path):
        try:
            frame = pd.read_csv(path, sep=" ", header=None, index_col=0, quoting=csv.QUOTE_NONE,
                                keep_default_na=False, encoding="utf-8")
        except (OSError, pd.errors.ParserError) as exc:
            raise CorpusIoError(f"cannot read word lexicon {path}: {exc}") from exc
        except pd.errors.EmptyDataError:
            return cls()
        vectors = {str(token): row.to_numpy(dtype=float) for token, row in frame.iterrows()}
        logger.info("loaded %d lexicon vectors from %s", len(vectors), path)
        return cls(vectors)


class Gazetteer:
    """Known named entities (persons, locations, organizations, languages)."""

    def __init__(self, entries=()):
        self.entries = {name.strip().lower(): category for name, category in entries}

    def __contains__(self, value):
        return value.strip().lower() in self.entries

    def __len__(self):
        return len(self.entries)

    @classmethod
    def load(cls, path):
        try:
            frame = pd.read_csv(path, sep="\t", header=None, names=["name", "category"], dtype=str,
                                keep_default_na=False, comment="#", encoding="utf-8")
        except (OSError, pd.errors.ParserError) as exc:
            raise CorpusIoError(f"cannot read gazetteer {path}: {exc}") from exc
        except pd.errors.EmptyDataError:
            return cls()
        return cls(zip(frame["name"], frame["category"]))


@lru_cache(maxsize=4)
def _sign_projection(seed):
    rng = np.random.default_rng(seed)
    return rng.choice(np.array([-1, 1], dtype=np.int8), size=(TRIGRAM_BUCKETS, EMBEDDING_DIM))


@lru_cache(maxsize=4)
def _fourier_features(seed):
    rng = np.random.default_rng(seed + 1)
    return rng.standard_normal(EMBEDDING_DIM), rng.uniform(0.0, 2.0 * np.pi, EMBEDDING_DIM)


def trigram_buckets(value):
    padded = f"  {value.lower()} "
    return [zlib.crc32(padded[i:i + 3].encode("utf-8")) % TRIGRAM_BUCKETS for i in range(len(padded) - 2)]


class DefaultEmbedder:
    dim = EMBEDDING_DIM

    def __init__(self, seed=42):
        self.seed = seed

    def embed_text(self, value):
        vector = _sign_projection(self.seed)[trigram_buckets(value)].sum(axis=0, dtype=np.float64)
        norm = np.linalg.norm(vector)
        return vector / norm if norm else vector

    def embed_numbers(self, numbers):
        numbers = np.asarray(numbers, dtype=float)
        numbers = numbers[np.isfinite(numbers)]
        if numbers.size == 0:
            return np.zeros((0, self.dim))
        std = numbers.std()
        z = (numbers - numbers.mean()) / std if std > 0 else np.zeros_like(numbers)
        weights, offsets = _fourier_features(self.seed)
        return np.sqrt(2.0 / self.dim) * np.cos(np.outer(z, weights) + offsets)

    def embed_values(self, values, fgt):
        """One row per value."""
        values = list(values)
        if not values:
            return np.zeros((0, self.dim))
        if fgt in NUMERIC_TYPES:
            return self.embed_numbers(to_numbers(values))
        if fgt == "date":
            return self.embed_numbers(days_since_epoch(values))
        return np.vstack([self.embed_text(str(value)) for value in values])
