"""
Run configuration: ``settings.LIDS_FORGE`` < ``--config`` TOML file < flags.

The merged mapping is validated with ``ForgeConfigSerializer``; a
``rest_framework.exceptions.ValidationError`` signals a usage error.
"""
import copy
import logging
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path

from django.conf import settings

from .construction import ThresholdConfig
from .exceptions import CorpusIoError
from .serializers import ForgeConfigSerializer

logger = logging.getLogger(__name__)

THRESHOLD_NAMES = ("alpha", "beta", "theta", "gamma")
PATH_FIELDS = ("data_dir", "pipelines_dir", "docs_dir", "out_dir", "lexicon_path", "gazetteer_path")


def _merge(base, layer):
    for key, value in layer.items():
        if value is None:
            continue
        if key in THRESHOLD_NAMES:
            base["thresholds"][key] = value
        elif key == "thresholds" and isinstance(value, dict):
            base["thresholds"].update({k: v for k, v in value.items() if v is not None})
        else:
            base[key] = value
    return base


def read_toml(path):
    try:
        with Path(path).open("rb") as handle:
            return tomllib.load(handle)
    except OSError as exc:
        raise CorpusIoError(f"cannot read config file {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise CorpusIoError(f"config file {path} is not valid TOML: {exc}") from exc


def load_config(config_path=None, **overrides):
    """Merged, validated configuration dict."""
    config = copy.deepcopy(settings.LIDS_FORGE)
    if config_path:
        _merge(config, read_toml(config_path))
    _merge(config, overrides)
    serializer = ForgeConfigSerializer(data=config)
    serializer.is_valid(raise_exception=True)
    config.update(serializer.validated_data)
    config["thresholds"] = dict(serializer.validated_data["thresholds"])
    logger.debug("configuration: %s", {key: config[key] for key in PATH_FIELDS})
    return config


def thresholds_from(config):
    return ThresholdConfig(**{name: float(config["thresholds"][name]) for name in THRESHOLD_NAMES})
