"""
Django settings for the lids-forge project.

lids-forge runs entirely through management commands; no database, templates,
or HTTP layer is configured. Engine defaults live in ``LIDS_FORGE`` and can be
overridden from the environment (a ``.env`` file at the project root is loaded
first), then from a TOML file and command-line flags at run time.
"""
from pathlib import Path
import os

from dotenv import load_dotenv

# Load environment variables from a .env file at project root (if present)
load_dotenv()

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

# Only used by Django internals (signing); lids-forge never serves requests.
SECRET_KEY = os.getenv("LIDS_SECRET_KEY", "lids-forge-offline-key")

DEBUG = os.getenv("LIDS_DEBUG", "0") == "1"

ALLOWED_HOSTS: list[str] = []

# No persistence engine: every artifact is a plain file under the output dir.
DATABASES: dict = {}

INSTALLED_APPS = [
    "rest_framework",
    "lids",
]

USE_TZ = True
TIME_ZONE = "UTC"

DEFAULT_AUTO_FIELD = "django.db.models.BigAutoField"

FIXTURES_DIR = BASE_DIR / "lids" / "fixtures"


def _env_float(name, default):
    value = os.getenv(name)
    return float(value) if value not in (None, "") else default


def _env_int(name, default):
    value = os.getenv(name)
    return int(value) if value not in (None, "") else default


# ===============================================
# LIDS-FORGE ENGINE CONFIGURATION
# ===============================================

LIDS_FORGE = {
    "data_dir": os.getenv("LIDS_DATA_DIR", "data"),
    "pipelines_dir": os.getenv("LIDS_PIPELINES_DIR", "pipelines"),
    "docs_dir": os.getenv("LIDS_DOCS_DIR", str(FIXTURES_DIR / "docs")),
    "out_dir": os.getenv("LIDS_OUT_DIR", "out"),
    "workers": _env_int("LIDS_WORKERS", 1),
    "lexicon_path": os.getenv("LIDS_LEXICON_PATH", str(FIXTURES_DIR / "lexicon.txt")),
    "gazetteer_path": os.getenv("LIDS_GAZETTEER_PATH", str(FIXTURES_DIR / "gazetteer.tsv")),
    "seed": _env_int("LIDS_SEED", 42),
    # Similarity thresholds used for the LiDS graph
    "thresholds": {
        "alpha": _env_float("LIDS_ALPHA", 0.75),
        "beta": _env_float("LIDS_BETA", 0.95),
        "theta": _env_float("LIDS_THETA", 0.90),
        "gamma": _env_float("LIDS_GAMMA", 0.60),
    },
    # Pipeline abstraction
    "insignificant_calls": [
        "print", "head", "tail", "info", "describe", "summary", "display", "show",
    ],
    "read_calls": ["read_csv", "read_json", "read_parquet"],
    # Data profiling
    "sample_size": 1000,
    "type_vote_share": 0.6,
    "text_lexicon_share": 0.7,
    "text_min_tokens": 3,
    # Graph construction
    "edge_partition_size": 5000,
    # Query layer
    "preprocessing_markers": [".preprocessing."],
    "cleaning_operations": ["fillna", "dropna", "interpolate"],
    "task_model_patterns": {
        "classification": r"Classifier|SVC|LogisticRegression",
        "regression": r"Regressor|SVR|LinearRegression|Ridge|Lasso",
        "clustering": r"KMeans|DBSCAN|AgglomerativeClustering",
    },
}


# ===============================================
# LOGGING
# ===============================================

LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "verbose": {
            "format": "%(asctime)s %(levelname)s %(name)s %(message)s",
        },
    },
    "handlers": {
        "console": {
            "class": "logging.StreamHandler",
            "formatter": "verbose",
        },
    },
    "loggers": {
        "lids": {
            "handlers": ["console"],
            "level": os.getenv("LIDS_LOG_LEVEL", "INFO"),
            "propagate": False,
        },
    },
}
