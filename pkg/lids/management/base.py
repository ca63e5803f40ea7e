"""Shared plumbing for the lids management commands."""
from contextlib import contextmanager

from django.core.management.base import BaseCommand, CommandError
from rest_framework.exceptions import ValidationError

from lids.config import load_config
from lids.exceptions import CorpusIoError, DimensionError, InvalidQuery, NotFound, TrigSyntaxError


def _flatten(detail, prefix=""):
    if isinstance(detail, dict):
        return "; ".join(_flatten(value, f"{prefix}{key}.") for key, value in detail.items())
    if isinstance(detail, list):
        return "; ".join(_flatten(value, prefix) for value in detail)
    return f"{prefix.rstrip('.')}: {detail}" if prefix else str(detail)


class ForgeCommand(BaseCommand):
    """Exit codes: 1 for unreadable inputs, 2 for usage errors."""

    def add_config_argument(self, parser):
        parser.add_argument("--config", help="TOML file overriding settings.LIDS_FORGE")

    def load_config(self, options, **overrides):
        with self.translate_errors():
            try:
                return load_config(options.get("config"), **overrides)
            except ValidationError as exc:
                raise CommandError(f"invalid configuration: {_flatten(exc.detail)}", returncode=2) from exc

    @contextmanager
    def translate_errors(self):
        try:
            yield
        except (CorpusIoError, TrigSyntaxError) as exc:
            raise CommandError(str(exc), returncode=1) from exc
        except (InvalidQuery, NotFound, DimensionError) as exc:
            raise CommandError(str(exc), returncode=2) from exc
