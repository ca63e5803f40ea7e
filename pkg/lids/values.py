"""Cell-level rules shared by type inference, statistics and embeddings."""
import re

import pandas as pd

BOOLEAN_TOKENS = frozenset({"true", "false", "t", "f", "yes", "no"})
TRUE_TOKENS = frozenset({"true", "t", "yes", "1"})

DATE_FORMATS = (
    "%Y-%m-%d",
    "%Y-%m-%dT%H:%M:%S",
    "%Y-%m-%d %H:%M:%S",
    "%d/%m/%Y",
    "%m/%d/%Y",
    "%b %d, %Y",
)

_INT = re.compile(r"^[+-]?\d+$")
_FLOAT = re.compile(r"^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$")
_WORD = re.compile(r"[A-Za-z]+(?:'[A-Za-z]+)?")
_NAME_PART = re.compile(r"[A-Z]+(?=[A-Z][a-z])|[A-Z]?[a-z]+|[A-Z]+|\d+")


def is_missing(value):
    return value is None or (isinstance(value, float) and value != value) or str(value).strip() == ""


def is_boolean_token(value):
    return value.strip().lower() in BOOLEAN_TOKENS


def is_true(value):
    return value.strip().lower() in TRUE_TOKENS


def is_int(value):
    return bool(_INT.match(value.strip()))


def is_float(value):
    return bool(_FLOAT.match(value.strip()))


def parse_dates(values):
    """Series of timestamps, NaT where no known format matches."""
    series = pd.Series(list(values), dtype="object").astype(str).str.strip()
    parsed = pd.Series(pd.NaT, index=series.index, dtype="datetime64[ns]")
    for fmt in DATE_FORMATS:
        missing = parsed.isna()
        if not missing.any():
            break
        parsed[missing] = pd.to_datetime(series[missing], format=fmt, errors="coerce")
    return parsed


def days_since_epoch(values):
    parsed = parse_dates(values)
    return ((parsed - pd.Timestamp("1970-01-01")) / pd.Timedelta(days=1)).to_numpy(dtype=float)


def to_numbers(values):
    return pd.to_numeric(pd.Series(list(values), dtype="object").astype(str).str.strip(),
                         errors="coerce").to_numpy(dtype=float)


def words(text):
    return [word.lower() for word in _WORD.findall(text)]


def name_tokens(name):
    """``homeTeam_2020-id`` -> ``["home", "team", "2020", "id"]``."""
    return [part.lower() for chunk in re.split(r"[^A-Za-z0-9]+", name) for part in _NAME_PART.findall(chunk)]
