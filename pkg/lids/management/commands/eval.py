from pathlib import Path

from django.core.management.base import CommandError

from lids.evaluation import load_ground_truth, precision_recall_at_k, relatedness_ranking
from lids.management.base import ForgeCommand
from lids.trig import read_trig_star


def _k_values(text):
    try:
        values = [int(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise CommandError(f"--k expects comma-separated integers, got {text!r}", returncode=2) from exc
    if not values or min(values) < 1:
        raise CommandError("--k values must be positive", returncode=2)
    return values


class Command(ForgeCommand):
    help = "Evaluate table discovery: mean precision@k and recall@k over sampled query tables."

    def add_arguments(self, parser):
        parser.add_argument("benchmark", choices=("discovery",))
        parser.add_argument("--graph", default="lids.trig")
        parser.add_argument("--ground-truth", required=True)
        parser.add_argument("--k", default="5,10")
        parser.add_argument("--queries", type=int, default=10)
        parser.add_argument("--seed", type=int)
        parser.add_argument("--kind", choices=("union", "join"), default="union")
        parser.add_argument("--format", choices=("csv", "json"), default="csv")
        self.add_config_argument(parser)

    def handle(self, *args, **options):
        config = self.load_config(options, seed=options["seed"])
        k_values = _k_values(options["k"])
        if options["queries"] < 1:
            raise CommandError("--queries must be at least 1", returncode=2)
        with self.translate_errors():
            truth = load_ground_truth(Path(options["ground_truth"]))
            store = read_trig_star(Path(options["graph"]))
        key = "uri" if all(q.startswith("http") for q in truth) else "label"
        ranking = relatedness_ranking(store, options["kind"], key)
        report = precision_recall_at_k(ranking, truth, k_values, options["queries"], config["seed"])
        if options["format"] == "json":
            self.stdout.write(report.to_json(orient="records", lines=True), ending="")
        else:
            self.stdout.write(report.to_csv(index=False), ending="")
