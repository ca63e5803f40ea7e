import time
from pathlib import Path

from lids.config import thresholds_from
from lids.construction import build_lids_graph, statistics_rows
from lids.embeddings import WordLexicon
from lids.management.base import ForgeCommand
from lids.trig import serialize_ntriples, write_trig_star


class Command(ForgeCommand):
    help = "Build the LiDS graph from column profiles, pipeline IRs and library docs; write TriG-star."

    def add_arguments(self, parser):
        parser.add_argument("--profiles", required=True)
        parser.add_argument("--irs", required=True)
        parser.add_argument("--docs", dest="docs_dir")
        parser.add_argument("--out", default="lids.trig", help="output .trig path; index.jsonl goes next to it")
        parser.add_argument("--alpha", type=float)
        parser.add_argument("--beta", type=float)
        parser.add_argument("--theta", type=float)
        parser.add_argument("--gamma", type=float)
        parser.add_argument("--workers", type=int)
        parser.add_argument("--ntriples", help="also export the default graph as N-Triples")
        self.add_config_argument(parser)

    def handle(self, *args, **options):
        config = self.load_config(
            options, docs_dir=options["docs_dir"], workers=options["workers"],
            alpha=options["alpha"], beta=options["beta"], theta=options["theta"], gamma=options["gamma"],
        )
        thresholds = thresholds_from(config)
        self.stdout.write(
            f"thresholds alpha={thresholds.alpha:.2f} beta={thresholds.beta:.2f} "
            f"theta={thresholds.theta:.2f} gamma={thresholds.gamma:.2f}"
        )
        out = Path(options["out"])
        started = time.perf_counter()
        with self.translate_errors():
            lexicon = WordLexicon.load(config["lexicon_path"])
            store, index = build_lids_graph(
                options["profiles"], options["irs"], config["docs_dir"], thresholds, lexicon,
                workers=config["workers"], partition_size=config["edge_partition_size"],
                edges_dir=out.parent / "edges",
            )
        write_trig_star(store, out)
        index.write(out.with_name("index.jsonl"))
        if options["ntriples"]:
            Path(options["ntriples"]).write_text(serialize_ntriples(store), encoding="utf-8")

        for row in statistics_rows(store):
            self.stdout.write(f"{row['category']:<18} {row['triples']:>8} {row['percent']:>6.2f}%")
        self.stdout.write(self.style.SUCCESS(
            f"wrote {len(store)} triples in {len(store.named_graphs)} pipeline graphs to {out} "
            f"in {time.perf_counter() - started:.2f}s"
        ))
