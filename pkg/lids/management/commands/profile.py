from pathlib import Path

from lids.corpus import profile_corpus
from lids.management.base import ForgeCommand


class Command(ForgeCommand):
    help = "Profile every column of every table under <data-dir>/<source>/<dataset>/<table>.csv."

    def add_arguments(self, parser):
        parser.add_argument("--data-dir")
        parser.add_argument("--out", dest="out_dir")
        parser.add_argument("--workers", type=int)
        self.add_config_argument(parser)

    def handle(self, *args, **options):
        config = self.load_config(options, data_dir=options["data_dir"], out_dir=options["out_dir"],
                                  workers=options["workers"])
        with self.translate_errors():
            report = profile_corpus(Path(config["data_dir"]), Path(config["out_dir"]), config, config["workers"])
        for path, reason in report.skipped:
            self.stdout.write(self.style.WARNING(f"skipped {path}: {reason}"))
        self.stdout.write(self.style.SUCCESS(
            f"profiled {report.succeeded} columns of {report.tables} tables in {report.elapsed:.2f}s"
        ))
