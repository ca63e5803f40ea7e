from pathlib import Path

from django.core.management.base import CommandError

from lids.corpus import abstract_corpus
from lids.management.base import ForgeCommand


class Command(ForgeCommand):
    help = "Abstract every pipeline script under <pipelines-dir>/<source>/<dataset>/<id>/pipeline.py."

    def add_arguments(self, parser):
        parser.add_argument("--pipelines-dir")
        parser.add_argument("--docs", dest="docs_dir")
        parser.add_argument("--out", dest="out_dir")
        parser.add_argument("--workers", type=int)
        self.add_config_argument(parser)

    def handle(self, *args, **options):
        config = self.load_config(options, pipelines_dir=options["pipelines_dir"], docs_dir=options["docs_dir"],
                                  out_dir=options["out_dir"], workers=options["workers"])
        with self.translate_errors():
            report = abstract_corpus(
                Path(config["pipelines_dir"]), Path(config["docs_dir"]), Path(config["out_dir"]),
                config["workers"], config["insignificant_calls"], config["read_calls"],
            )
        for path, reason in report.skipped:
            self.stdout.write(self.style.WARNING(f"skipped {path}: {reason}"))
        if not report.succeeded and not report.skipped:
            self.stdout.write(self.style.WARNING(f"no pipeline scripts under {config['pipelines_dir']}"))
            return
        if not report.succeeded:
            raise CommandError(f"none of {len(report.skipped)} pipeline scripts could be abstracted", returncode=1)
        self.stdout.write(self.style.SUCCESS(
            f"abstracted {report.succeeded} pipelines, skipped {len(report.skipped)} in {report.elapsed:.2f}s"
        ))
