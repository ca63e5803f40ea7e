"""
Corpus drivers.

``profile_corpus`` maps column profiling over every table under
``<data-dir>/<source>/<dataset>/<table>.csv``; ``abstract_corpus`` maps
pipeline abstraction over every ``<pipelines-dir>/<source>/<dataset>/<id>/pipeline.py``.
Workers are pure; the driver alone reads inputs and writes outputs, and a
bad input is logged, counted and skipped.
"""
import json
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path

from rest_framework.exceptions import ValidationError

from .embeddings import DefaultEmbedder, Gazetteer, WordLexicon
from .exceptions import CorpusIoError, PipelineParseError
from .library_docs import load_library_docs
from .parallel import map_partitions, partition
from .pipelines import (
    DEFAULT_INSIGNIFICANT_CALLS, DEFAULT_READ_CALLS, PipelineGraphIR, PipelineMetadata, abstract_pipeline,
    dump_ir,
)
from .profiler import ColumnMetadata, ColumnProfile, ProfilerContext, profile_column, read_table, write_profile
from .serializers import ColumnProfileSerializer, PipelineGraphIRSerializer, PipelineMetadataSerializer

logger = logging.getLogger(__name__)


@dataclass
class RunReport:
    succeeded: int = 0
    tables: int = 0
    skipped: list = field(default_factory=list)
    outputs: list = field(default_factory=list)
    elapsed: float = 0.0

    def skip(self, path, reason):
        logger.warning("skipped %s: %s", path, reason)
        self.skipped.append((str(path), str(reason)))


def _require_dir(path, what):
    path = Path(path)
    if not path.is_dir():
        raise CorpusIoError(f"{what} directory {path} is not readable")
    return path


def discover_tables(data_dir):
    data_dir = _require_dir(data_dir, "data")
    return [
        (path.parent.parent.name, path.parent.name, path)
        for path in sorted(data_dir.glob("*/*/*.csv"))
        if path.is_file()
    ]


def discover_pipelines(pipelines_dir):
    pipelines_dir = _require_dir(pipelines_dir, "pipelines")
    return sorted(path for path in pipelines_dir.glob("*/*/*/pipeline.py") if path.is_file())


# ---------------------------------------------------------------------------
# profiling
# ---------------------------------------------------------------------------

_PROFILER: dict = {}


def _init_profiler(lexicon_path, gazetteer_path, seed, sample_size, vote_share, lexicon_share, min_tokens):
    _PROFILER["context"] = ProfilerContext(
        word_lexicon=WordLexicon.load(lexicon_path),
        gazetteer=Gazetteer.load(gazetteer_path),
        embedder=DefaultEmbedder(seed),
        sample_size=sample_size,
        vote_share=vote_share,
        lexicon_share=lexicon_share,
        min_tokens=min_tokens,
    )


def _profile_partition(columns):
    context = _PROFILER["context"]
    return [profile_column(metadata, values, context).to_dict() for metadata, values in columns]


def read_corpus_columns(data_dir, report):
    """(metadata, values) for every column of every readable table."""
    columns = []
    for source, dataset, path in discover_tables(data_dir):
        try:
            frame = read_table(path)
        except CorpusIoError as exc:
            report.skip(path, exc)
            continue
        report.tables += 1
        for name in frame.columns:
            columns.append((ColumnMetadata(source, dataset, path.name, str(name)), frame[name].tolist()))
    return columns


def profile_corpus(data_dir, out_dir, config, workers=1):
    """Profile every column under ``data_dir`` into ``<out>/…/<column>.profile.json``."""
    started = time.perf_counter()
    report = RunReport()
    columns = read_corpus_columns(data_dir, report)
    initargs = (
        config["lexicon_path"], config["gazetteer_path"], config["seed"], config.get("sample_size", 1000),
        config.get("type_vote_share", 0.6), config.get("text_lexicon_share", 0.7), config.get("text_min_tokens", 3),
    )
    chunk = max(1, len(columns) // (workers * 4) or 1)
    results = map_partitions(_profile_partition, partition(columns, chunk), workers,
                             initializer=_init_profiler, initargs=initargs)
    for part in results:
        for data in part:
            report.outputs.append(write_profile(ColumnProfile.from_dict(data), out_dir))
            report.succeeded += 1
    report.elapsed = time.perf_counter() - started
    logger.info("profiled %d columns of %d tables in %.2fs", report.succeeded, report.tables, report.elapsed)
    return report


def load_profiles(profiles_dir):
    profiles = []
    for path in sorted(_require_dir(profiles_dir, "profiles").rglob("*.profile.json")):
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, ValueError) as exc:
            logger.warning("unreadable profile %s: %s", path, exc)
            continue
        serializer = ColumnProfileSerializer(data=data)
        if not serializer.is_valid():
            logger.warning("malformed profile %s: %s", path, serializer.errors)
            continue
        profiles.append(ColumnProfile.from_dict(data))
    logger.info("loaded %d column profiles from %s", len(profiles), profiles_dir)
    return profiles


# ---------------------------------------------------------------------------
# abstraction
# ---------------------------------------------------------------------------

_ABSTRACTOR: dict = {}


def _init_abstractor(docs_dir, insignificant_calls, read_calls):
    _ABSTRACTOR["docs"] = load_library_docs(Path(docs_dir))
    _ABSTRACTOR["insignificant_calls"] = tuple(insignificant_calls)
    _ABSTRACTOR["read_calls"] = tuple(read_calls)


def _abstract_partition(tasks):
    results = []
    for path, script, metadata in tasks:
        try:
            ir = abstract_pipeline(script, PipelineMetadata.from_dict(metadata), _ABSTRACTOR["docs"],
                                   _ABSTRACTOR["insignificant_calls"], _ABSTRACTOR["read_calls"])
        except PipelineParseError as exc:
            results.append((path, None, str(exc)))
            continue
        results.append((path, ir.to_dict(), None))
    return results


def _pipeline_task(script_path):
    pipeline_dir = script_path.parent
    metadata = {}
    metadata_path = pipeline_dir / "metadata.json"
    if metadata_path.is_file():
        metadata = json.loads(metadata_path.read_text(encoding="utf-8"))
    metadata = {
        **metadata,
        "pipeline_id": pipeline_dir.name,
        "source": pipeline_dir.parent.parent.name,
        "dataset_name": metadata.get("dataset_name") or pipeline_dir.parent.name,
    }
    serializer = PipelineMetadataSerializer(data=metadata)
    serializer.is_valid(raise_exception=True)
    script = script_path.read_text(encoding="utf-8")
    return str(script_path), script, dict(serializer.validated_data)


def ir_path(out_dir, metadata):
    return Path(out_dir) / metadata.source / metadata.dataset_name / f"{metadata.pipeline_id}.ir.json"


def abstract_corpus(pipelines_dir, docs_dir, out_dir, workers=1,
                    insignificant_calls=DEFAULT_INSIGNIFICANT_CALLS, read_calls=DEFAULT_READ_CALLS):
    started = time.perf_counter()
    report = RunReport()
    _require_dir(docs_dir, "documentation")
    tasks = []
    for script_path in discover_pipelines(pipelines_dir):
        try:
            tasks.append(_pipeline_task(script_path))
        except (OSError, UnicodeDecodeError, ValueError, ValidationError) as exc:
            report.skip(script_path, exc)
    chunk = max(1, len(tasks) // (workers * 4) or 1)
    results = map_partitions(_abstract_partition, partition(tasks, chunk), workers,
                             initializer=_init_abstractor,
                             initargs=(str(docs_dir), tuple(insignificant_calls), tuple(read_calls)))
    for part in results:
        for path, data, error in part:
            if error is not None:
                report.skip(path, error)
                continue
            ir = PipelineGraphIR.from_dict(data)
            target = ir_path(out_dir, ir.metadata)
            dump_ir(ir, target)
            report.outputs.append(target)
            report.succeeded += 1
    report.elapsed = time.perf_counter() - started
    logger.info("abstracted %d pipelines (%d skipped) in %.2fs",
                report.succeeded, len(report.skipped), report.elapsed)
    return report


def load_irs(irs_dir):
    irs = []
    for path in sorted(_require_dir(irs_dir, "IR").rglob("*.ir.json")):
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, ValueError) as exc:
            logger.warning("unreadable IR %s: %s", path, exc)
            continue
        serializer = PipelineGraphIRSerializer(data=data)
        if not serializer.is_valid():
            logger.warning("malformed IR %s: %s", path, serializer.errors)
            continue
        irs.append(PipelineGraphIR.from_dict(data))
    logger.info("loaded %d pipeline IRs from %s", len(irs), irs_dir)
    return irs
