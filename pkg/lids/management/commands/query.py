import json
from pathlib import Path

from django.core.management.base import CommandError

from lids import queries
from lids.exceptions import InvalidQuery
from lids.index import VectorIndex
from lids.management.base import ForgeCommand
from lids.trig import read_trig_star


def _keywords(store, index, args, options, config):
    if len(args) != 1:
        raise InvalidQuery("search-keywords takes one JSON argument, e.g. '[[\"heart\",\"disease\"],\"patients\"]'")
    try:
        conditions = json.loads(args[0])
    except ValueError as exc:
        raise InvalidQuery(f"keyword conditions are not JSON: {exc}") from exc
    return queries.search_keywords(store, conditions)


def _arity(name, args, count):
    if len(args) != count:
        raise InvalidQuery(f"{name} takes {count} argument(s), got {len(args)}")
    return args


def _path_to_table(store, index, args, options, config):
    if not 1 <= len(args) <= 2:
        raise InvalidQuery("get-path-to-table takes a start table and an optional target table")
    return queries.get_path_to_table(store, args[0], args[1] if len(args) > 1 else None, options["hops"])


def _recommend(func, extra):
    def run(store, index, args, options, config):
        dataset, *rest = _arity(func.__name__, args, 1 + extra)
        return func(store, index, dataset, *rest, config=config, min_similarity=options["min_similarity"])
    return run


OPERATIONS = {
    "search-keywords": _keywords,
    "find-unionable-columns": lambda s, i, a, o, c: queries.find_unionable_columns(
        s, *_arity("find-unionable-columns", a, 2)),
    "get-path-to-table": _path_to_table,
    "get-top-k-library-used": lambda s, i, a, o, c: queries.get_top_k_library_used(s, o["k"], o["task"]),
    "get-top-used-libraries": lambda s, i, a, o, c: queries.get_top_used_libraries(s, o["k"], o["task"]),
    "get-pipelines-calling-libraries": lambda s, i, a, o, c: queries.get_pipelines_calling_libraries(s, *a),
    "recommend-transformations": _recommend(queries.recommend_transformations, 0),
    "recommend-ml-models": _recommend(queries.recommend_ml_models, 1),
    "recommend-hyperparameters": _recommend(queries.recommend_hyperparameters, 1),
    "get-unionable-tables": lambda s, i, a, o, c: queries.get_unionable_tables(
        s, *_arity("get-unionable-tables", a, 1), o["k"]),
    "get-joinable-tables": lambda s, i, a, o, c: queries.get_joinable_tables(
        s, *_arity("get-joinable-tables", a, 1), o["k"]),
    "get-top-used-columns": lambda s, i, a, o, c: queries.get_top_used_columns(
        s, *_arity("get-top-used-columns", a, 1), o["k"]),
    "get-pipeline-sizes": lambda s, i, a, o, c: queries.get_pipeline_sizes(s, o["max_statements"]),
    "get-most-used-subpackages": lambda s, i, a, o, c: queries.get_most_used_subpackages(
        s, *_arity("get-most-used-subpackages", a, 1), o["k"]),
    "graph-stats": lambda s, i, a, o, c: queries.graph_stats(s),
}


class Command(ForgeCommand):
    help = "Run a predefined discovery or recommendation operation over a built LiDS graph."

    def add_arguments(self, parser):
        parser.add_argument("operation", choices=sorted(OPERATIONS))
        parser.add_argument("args", nargs="*")
        parser.add_argument("--graph", default="lids.trig")
        parser.add_argument("--index", help="index.jsonl; defaults to the one next to --graph")
        parser.add_argument("--format", choices=("csv", "json"), default="csv")
        parser.add_argument("--k", type=int, default=10)
        parser.add_argument("--task")
        parser.add_argument("--hops", type=int, default=2)
        parser.add_argument("--max-statements", type=int)
        parser.add_argument("--min-similarity", type=float)
        self.add_config_argument(parser)

    def handle(self, *args, **options):
        config = self.load_config(options)
        if options["k"] < 1:
            raise CommandError("--k must be at least 1", returncode=2)
        graph_path = Path(options["graph"])
        index_path = Path(options["index"]) if options["index"] else graph_path.with_name("index.jsonl")
        with self.translate_errors():
            store = read_trig_star(graph_path)
            index = VectorIndex.read(index_path) if index_path.exists() else None
            frame = OPERATIONS[options["operation"]](store, index, list(args), options, config)
        if options["format"] == "json":
            self.stdout.write(frame.to_json(orient="records", lines=True), ending="")
        else:
            self.stdout.write(frame.to_csv(index=False), ending="")
