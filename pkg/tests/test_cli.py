"""End-to-end CLI tests over the committed fixtures."""

import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from gasflow.cli import main

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture()
def runner():
    return CliRunner()


def run_ok(runner, args):
    result = runner.invoke(main, args, catch_exceptions=False)
    assert result.exit_code == 0, result.output
    return result


def ingest_args(out_dir, prices=None, headlines=None, split="0.6"):
    return [
        "ingest",
        "--prices", str(prices or FIXTURES / "prices_future.csv"),
        "--headlines", str(headlines or FIXTURES / "headlines_20.jsonl"),
        "--split", split,
        "--out-dir", str(out_dir),
    ]


@pytest.fixture()
def pipeline(tmp_path, runner):
    """Ingest + extract once; hand the paths to dependent tests."""
    run_ok(runner, ingest_args(tmp_path / "ingest"))
    corpus = tmp_path / "ingest" / "cache" / "corpus.json"
    run_ok(
        runner,
        [
            "extract",
            "--conllu", str(FIXTURES / "annotated_20.conllu"),
            "--wordnet-dir", str(FIXTURES / "wordnet"),
            "--mode", "full",
            "--out-dir", str(tmp_path / "extract"),
        ],
    )
    return {
        "corpus": corpus,
        "events": tmp_path / "extract" / "events.jsonl",
        "coverage": tmp_path / "extract" / "coverage.csv",
        "tmp": tmp_path,
    }


def train_args(pipeline, out_dir, seed=3, epochs=2):
    return [
        "train",
        "--corpus", str(pipeline["corpus"]),
        "--events", str(pipeline["events"]),
        "--embeddings", str(FIXTURES / "embeddings_k5.txt"),
        "--k", "5",
        "--m", "10",
        "--h", "5",
        "--seed", str(seed),
        "--epochs", str(epochs),
        "--batch-size", "8",
        "--learning-rate", "1e-3",
        "--out-dir", str(out_dir),
    ]


class TestIngest:
    def test_valid_fixture_exit_zero(self, tmp_path, runner):
        result = run_ok(runner, ingest_args(tmp_path / "out"))
        assert "trading_days: 65" in result.output
        assert (tmp_path / "out" / "cache" / "corpus.json").exists()
        assert (tmp_path / "out" / "run_manifest.json").exists()

    def test_missing_file_exit_two(self, tmp_path, runner):
        result = runner.invoke(main, ingest_args(tmp_path / "out", prices=tmp_path / "nope.csv"))
        assert result.exit_code == 2

    def test_corrupt_price_row_exit_two_with_row(self, tmp_path, runner):
        bad = tmp_path / "bad.csv"
        good = (FIXTURES / "prices_future.csv").read_text().splitlines()
        good[3] = good[3].rsplit(",", 1)[0] + ",-5.0"
        bad.write_text("\n".join(good) + "\n")
        result = runner.invoke(main, ingest_args(tmp_path / "out", prices=bad))
        assert result.exit_code == 2
        assert "row 4" in result.output

    def test_cache_env_override(self, tmp_path, runner, monkeypatch):
        cache = tmp_path / "elsewhere"
        monkeypatch.setenv("GASFLOW_CACHE", str(cache))
        run_ok(runner, ingest_args(tmp_path / "out"))
        assert (cache / "corpus.json").exists()


class TestExtract:
    def test_coverage_table_and_ordering(self, pipeline):
        rows = pipeline["coverage"].read_text().splitlines()
        assert rows[0] == "mode,headlines_total,headlines_with_events,fraction"
        full = rows[1].split(",")
        verb = rows[2].split(",")
        assert (full[1], full[2]) == ("20", "11")
        assert (verb[1], verb[2]) == ("20", "7")
        assert float(full[3]) >= float(verb[3])

    def test_events_schema(self, pipeline):
        lines = pipeline["events"].read_text().splitlines()
        assert len(lines) == 11
        event = json.loads(lines[0])
        assert set(event) == {"headline_id", "date", "span_text", "trigger", "gate_supersense"}

    def test_empty_conllu_exit_one(self, tmp_path, runner):
        empty = tmp_path / "empty.conllu"
        empty.write_text("\n")
        result = runner.invoke(
            main,
            [
                "extract",
                "--conllu", str(empty),
                "--wordnet-dir", str(FIXTURES / "wordnet"),
                "--out-dir", str(tmp_path / "out"),
            ],
        )
        assert result.exit_code == 1

    def test_missing_conllu_exit_two(self, tmp_path, runner):
        result = runner.invoke(
            main,
            [
                "extract",
                "--conllu", str(tmp_path / "missing.conllu"),
                "--wordnet-dir", str(FIXTURES / "wordnet"),
                "--out-dir", str(tmp_path / "out"),
            ],
        )
        assert result.exit_code == 2


class TestTrain:
    def test_same_seed_identical_checkpoints(self, pipeline, runner):
        a = pipeline["tmp"] / "model_a"
        b = pipeline["tmp"] / "model_b"
        run_ok(runner, train_args(pipeline, a))
        run_ok(runner, train_args(pipeline, b))
        assert (a / "checkpoint.bin").read_bytes() == (b / "checkpoint.bin").read_bytes()
        assert (a / "loss_history.csv").read_text() == (b / "loss_history.csv").read_text()

    def test_bad_shape_config_exit_two(self, pipeline, runner):
        args = train_args(pipeline, pipeline["tmp"] / "model_bad")
        args[args.index("--m") + 1] = "2"  # smaller than the day-axis kernel extent
        result = runner.invoke(main, args)
        assert result.exit_code == 2


class TestReportCmd:
    def test_mse_matches_independent_recomputation(self, pipeline, runner):
        model_dir = pipeline["tmp"] / "model"
        run_ok(runner, train_args(pipeline, model_dir))
        out = pipeline["tmp"] / "report"
        run_ok(
            runner,
            [
                "report",
                "--corpus", str(pipeline["corpus"]),
                "--events", str(pipeline["events"]),
                "--embeddings", str(FIXTURES / "embeddings_k5.txt"),
                "--model-dir", str(model_dir),
                "--out-dir", str(out),
            ],
        )
        rows = (out / "evaluation.csv").read_text().splitlines()
        table = {r.split(",")[0]: [float(v) for v in r.split(",")[1:]] for r in rows[1:]}
        assert set(table) == {"c3d", "persistence", "linear-ar"}
        # independent persistence recomputation from the corpus itself
        corpus = json.loads(pipeline["corpus"].read_text())
        prices = [d["price"] for d in corpus["days"]][corpus["split_index"]:]
        m, h = 10, 5
        errs = []
        for t in range(len(prices) - m - h + 1):
            last = prices[t + m - 1]
            errs.extend((last - prices[t + m + j]) ** 2 for j in range(h))
        expected = sum(errs) / len(errs)
        assert table["persistence"][-1] == pytest.approx(expected, rel=1e-12)

    def test_missing_checkpoint_exit_two(self, pipeline, runner):
        result = runner.invoke(
            main,
            [
                "report",
                "--corpus", str(pipeline["corpus"]),
                "--events", str(pipeline["events"]),
                "--embeddings", str(FIXTURES / "embeddings_k5.txt"),
                "--model-dir", str(pipeline["tmp"] / "nonexistent"),
                "--out-dir", str(pipeline["tmp"] / "report2"),
            ],
        )
        assert result.exit_code == 2


class TestBacktestCmd:
    def backtest(self, pipeline, runner, out, *extra):
        return run_ok(
            runner,
            [
                "backtest",
                "--corpus", str(pipeline["corpus"]),
                "--total-volume", "1200",
                "--days", "20",
                "--out-dir", str(out),
                *extra,
            ],
        )

    def test_always_fire_matches_baseline(self, pipeline, runner):
        out = pipeline["tmp"] / "bt"
        self.backtest(pipeline, runner, out, "--model", "always-fire")
        report = (out / "backtest_report.txt").read_text()
        values = dict(line.split(" = ") for line in report.splitlines())
        assert values["strategy.total_cost"] == values["baseline.total_cost"]
        assert values["strategy.total_volume"] == values["baseline.total_volume"]

    def test_force_final_buys_exactly_total(self, pipeline, runner):
        out = pipeline["tmp"] / "bt_force"
        self.backtest(pipeline, runner, out, "--model", "linear-ar", "--force-final")
        report = (out / "backtest_report.txt").read_text()
        values = dict(line.split(" = ") for line in report.splitlines())
        assert float(values["strategy.total_volume"]) == pytest.approx(1200.0)

    def test_ledger_accounting_matches_quota_replay(self, pipeline, runner):
        out = pipeline["tmp"] / "bt_oracle"
        self.backtest(pipeline, runner, out, "--model", "always-fire")
        corpus = json.loads(pipeline["corpus"].read_text())
        test_days = corpus["days"][corpus["split_index"]:][:20]
        ledger_rows = (out / "ledger.csv").read_text().splitlines()[1:]
        assert len(ledger_rows) == 20
        quota = 1200.0 / 20
        bought = 0.0
        purchases = [row.split(",") for row in ledger_rows]
        for d, day in enumerate(test_days):
            while purchases and purchases[0][0] == day["date"]:
                row = purchases.pop(0)
                expected_volume = quota * (d + 1) - bought
                assert float(row[1]) == pytest.approx(expected_volume, abs=1e-9)
                assert float(row[2]) == day["price"]
                bought += float(row[1])
        assert not purchases
        assert bought == pytest.approx(1200.0)

    def test_plot_outputs_written(self, pipeline, runner):
        out = pipeline["tmp"] / "bt_plot"
        self.backtest(pipeline, runner, out, "--model", "always-fire")
        assert (out / "purchases_plot.csv").exists()
        svg = (out / "purchases_plot.svg").read_text()
        assert svg.startswith("<svg") and "polyline" in svg

    def test_c3d_backtest_runs(self, pipeline, runner):
        model_dir = pipeline["tmp"] / "model"
        run_ok(runner, train_args(pipeline, model_dir))
        out = pipeline["tmp"] / "bt_c3d"
        self.backtest(
            pipeline, runner, out,
            "--model", "c3d",
            "--model-dir", str(model_dir),
            "--events", str(pipeline["events"]),
            "--embeddings", str(FIXTURES / "embeddings_k5.txt"),
            "--lookahead", "10",
        )
        assert (out / "ledger.csv").exists()


class TestTfidfCmd:
    def test_three_rankings_written(self, pipeline, runner):
        bt = pipeline["tmp"] / "bt_for_tfidf"
        run_ok(
            runner,
            [
                "backtest",
                "--corpus", str(pipeline["corpus"]),
                "--model", "always-fire",
                "--days", "20",
                "--out-dir", str(bt),
            ],
        )
        out = pipeline["tmp"] / "tfidf"
        run_ok(
            runner,
            [
                "tfidf",
                "--corpus", str(pipeline["corpus"]),
                "--events", str(pipeline["events"]),
                "--ledger", str(bt / "ledger.csv"),
                "--top-n", "5",
                "--out-dir", str(out),
            ],
        )
        for view in ("raw", "events", "pre_purchase"):
            text = (out / f"tfidf_{view}.csv").read_text()
            assert "rank,stem,score" in text
            assert f"view={view}" in text
        # two fixture headlines fall inside the pre-purchase windows, so the
        # ranking carries their event stems
        pre = (out / "tfidf_pre_purchase.csv").read_text()
        assert "storm" in pre or "export" in pre


class TestExtractMotivating:
    def test_quoted_spans_survive_the_cli(self, tmp_path, runner):
        out = tmp_path / "extract"
        run_ok(
            runner,
            [
                "extract",
                "--conllu", str(FIXTURES / "motivating.conllu"),
                "--wordnet-dir", str(FIXTURES / "wordnet"),
                "--mode", "full",
                "--out-dir", str(out),
            ],
        )
        events = [json.loads(line) for line in (out / "events.jsonl").read_text().splitlines()]
        spans = {e["span_text"] for e in events}
        assert spans == {"tremor in Lancashire site", "natural gas plentiful and cheap"}
        verb_out = tmp_path / "extract_verb"
        run_ok(
            runner,
            [
                "extract",
                "--conllu", str(FIXTURES / "motivating.conllu"),
                "--wordnet-dir", str(FIXTURES / "wordnet"),
                "--mode", "verb-only",
                "--out-dir", str(verb_out),
            ],
        )
        assert (verb_out / "events.jsonl").read_text() == ""


class TestRerun:
    def test_rerun_reproduces_extract_outputs(self, pipeline, runner):
        manifest = pipeline["tmp"] / "extract" / "run_manifest.json"
        out2 = pipeline["tmp"] / "extract_rerun"
        run_ok(runner, ["rerun", "--manifest", str(manifest), "--out-dir", str(out2)])
        original = pipeline["tmp"] / "extract"
        for name in ("events.jsonl", "coverage.csv"):
            assert (out2 / name).read_bytes() == (original / name).read_bytes()

    def test_rerun_detects_changed_input(self, pipeline, runner, tmp_path):
        manifest_path = pipeline["tmp"] / "extract" / "run_manifest.json"
        manifest = json.loads(manifest_path.read_text())
        key = next(iter(manifest["input_checksums"]))
        manifest["input_checksums"][key] = "0" * 64
        tampered = tmp_path / "tampered.json"
        tampered.write_text(json.dumps(manifest))
        result = runner.invoke(
            main, ["rerun", "--manifest", str(tampered), "--out-dir", str(tmp_path / "out")]
        )
        assert result.exit_code == 2
