import json
import shutil
import tempfile
from io import StringIO
from pathlib import Path

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase

from lids.trig import read_trig_star

from .factories import CORPUS_DIR, DOCS_DIR, GOLDEN_DIR, GROUND_TRUTH, PIPELINES_DIR


def run(*args, **options):
    out = StringIO()
    call_command(*args, stdout=out, **options)
    return out.getvalue()


class CommandPipelineTests(SimpleTestCase):
    """profile -> abstract -> build_kg -> query / eval over the titanic fixtures."""

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.tmp = Path(tempfile.mkdtemp())
        cls.graph = cls.tmp / "kg" / "lids.trig"
        cls.profile_output = run("profile", data_dir=str(CORPUS_DIR), out_dir=str(cls.tmp / "profiles"))
        cls.abstract_output = run("abstract", pipelines_dir=str(PIPELINES_DIR), docs_dir=str(DOCS_DIR),
                                  out_dir=str(cls.tmp / "irs"))
        cls.build_output = run("build_kg", profiles=str(cls.tmp / "profiles"), irs=str(cls.tmp / "irs"),
                               docs_dir=str(DOCS_DIR), out=str(cls.graph),
                               ntriples=str(cls.tmp / "kg" / "default.nt"))

    @classmethod
    def tearDownClass(cls):
        shutil.rmtree(cls.tmp, ignore_errors=True)
        super().tearDownClass()

    def query(self, *args, **options):
        return run("query", *args, graph=str(self.graph), **options)

    def test_profile(self):
        self.assertIn("profiled 15 columns of 2 tables", self.profile_output)

    def test_abstract(self):
        self.assertIn("abstracted 2 pipelines, skipped 0", self.abstract_output)
        self.assertTrue((self.tmp / "irs" / "kaggle" / "titanic" / "rf-baseline.ir.json").is_file())

    def test_build_kg(self):
        self.assertIn("thresholds alpha=0.75 beta=0.95 theta=0.90 gamma=0.60", self.build_output)
        self.assertIn("in 2 pipeline graphs", self.build_output)
        self.assertTrue((self.tmp / "kg" / "index.jsonl").is_file())
        self.assertTrue(list((self.tmp / "kg" / "edges").glob("part-*.json")))
        self.assertTrue((self.tmp / "kg" / "default.nt").read_text(encoding="utf-8"))
        self.assertEqual(len(read_trig_star(self.graph).named_graphs), 2)

    def test_build_kg_prints_the_frozen_category_counts(self):
        golden = json.loads((GOLDEN_DIR / "titanic_statistics.json").read_text(encoding="utf-8"))
        printed = {}
        for line in self.build_output.splitlines():
            fields = line.split()
            if len(fields) == 3 and fields[0] in golden:
                printed[fields[0]] = int(fields[1])
        self.assertEqual(printed, golden)

    def test_graph_stats(self):
        lines = self.query("graph-stats").splitlines()
        self.assertEqual(lines[0], "category,triples,percent")
        self.assertIn("code_flow,24,", "\n".join(lines))

    def test_pipeline_sizes(self):
        self.assertEqual(self.query("get-pipeline-sizes").splitlines(), [
            "pipeline,pipeline_id,statements",
            "http://kglids.org/resource/kaggle/titanic/scaled-svc,scaled-svc,12",
            "http://kglids.org/resource/kaggle/titanic/rf-baseline,rf-baseline,14",
        ])

    def test_json_output(self):
        output = self.query("get-top-k-library-used", format="json", k=1)
        self.assertEqual(output.strip(), '{"library":"pandas","pipeline_count":2}')

    def test_keyword_search(self):
        output = self.query("search-keywords", '[["survived"]]')
        self.assertIn("kaggle,titanic,train.csv,", output)
        self.assertNotIn("test.csv", output)

    def test_recommendation_with_an_unseen_directory(self):
        output = self.query("recommend-ml-models", str(CORPUS_DIR / "kaggle" / "titanic"), "classification")
        self.assertIn("sklearn.ensemble.RandomForestClassifier,0.78", output)

    def test_query_usage_errors(self):
        for args, options in (
            (("get-unionable-tables", "kaggle/titanic/missing.csv"), {}),
            (("get-unionable-tables",), {}),
            (("search-keywords", "not json"), {}),
            (("graph-stats",), {"k": 0}),
        ):
            with self.subTest(args=args), self.assertRaises(CommandError) as raised:
                self.query(*args, **options)
            self.assertEqual(raised.exception.returncode, 2)

    def test_missing_graph(self):
        with self.assertRaises(CommandError) as raised:
            run("query", "graph-stats", graph=str(self.tmp / "missing.trig"))
        self.assertEqual(raised.exception.returncode, 1)

    def test_eval(self):
        output = run("eval", "discovery", graph=str(self.graph), ground_truth=str(GROUND_TRUTH), k="1")
        self.assertEqual(output.splitlines(), ["k,precision,recall,queries", "1,1.0,1.0,2"])

    def test_eval_errors(self):
        with self.assertRaises(CommandError) as raised:
            run("eval", "discovery", graph=str(self.graph), ground_truth=str(GROUND_TRUTH), k="0")
        self.assertEqual(raised.exception.returncode, 2)
        with self.assertRaises(CommandError) as raised:
            run("eval", "discovery", graph=str(self.graph), ground_truth=str(self.tmp / "missing.csv"))
        self.assertEqual(raised.exception.returncode, 1)


class CommandErrorTests(SimpleTestCase):
    def test_threshold_out_of_range(self):
        with tempfile.TemporaryDirectory() as tmp:
            with self.assertRaises(CommandError) as raised:
                run("build_kg", profiles=tmp, irs=tmp, out=str(Path(tmp) / "lids.trig"), alpha=1.5)
        self.assertEqual(raised.exception.returncode, 2)

    def test_missing_profiles_directory(self):
        with tempfile.TemporaryDirectory() as tmp:
            with self.assertRaises(CommandError) as raised:
                run("build_kg", profiles=str(Path(tmp) / "none"), irs=tmp, out=str(Path(tmp) / "lids.trig"))
        self.assertEqual(raised.exception.returncode, 1)

    def test_abstract_empty_directory(self):
        with tempfile.TemporaryDirectory() as tmp:
            output = run("abstract", pipelines_dir=tmp, docs_dir=str(DOCS_DIR), out_dir=str(Path(tmp) / "irs"))
        self.assertIn("no pipeline scripts", output)

    def test_abstract_only_broken_scripts(self):
        with tempfile.TemporaryDirectory() as tmp:
            script = Path(tmp) / "lake" / "ds" / "bad" / "pipeline.py"
            script.parent.mkdir(parents=True)
            script.write_text("x = (\n", encoding="utf-8")
            with self.assertLogs("lids.corpus", level="WARNING"), self.assertRaises(CommandError) as raised:
                run("abstract", pipelines_dir=tmp, docs_dir=str(DOCS_DIR), out_dir=str(Path(tmp) / "irs"))
        self.assertEqual(raised.exception.returncode, 1)

    def test_missing_data_directory(self):
        with tempfile.TemporaryDirectory() as tmp:
            with self.assertRaises(CommandError) as raised:
                run("profile", data_dir=str(Path(tmp) / "none"), out_dir=tmp)
        self.assertEqual(raised.exception.returncode, 1)
