"""Command-line entry points, driven through main(argv)."""
import os

import pytest

from transpick.cli import main
from transpick.corpus import read_metrics, read_selection


class TestValidate:
    def test_accepts_a_good_corpus(self, toy4_path, capsys):
        assert main(["validate", toy4_path]) == 0
        out = capsys.readouterr().out
        assert out.startswith("ok: 4 examples")

    def test_rejects_a_broken_corpus(self, tmp_path, capsys):
        path = tmp_path / "broken.jsonl"
        path.write_text("{not json\n", encoding="utf-8")
        assert main(["validate", str(path)]) == 1
        assert capsys.readouterr().err.startswith("invalid:")

    def test_rejects_a_missing_file(self, tmp_path, capsys):
        assert main(["validate", str(tmp_path / "nope.jsonl")]) == 1
        assert capsys.readouterr().err.startswith("invalid:")


class TestGenCorpus:
    def test_writes_and_validates(self, tmp_path, capsys):
        out = str(tmp_path / "synthetic.jsonl")
        code = main(
            ["gen-corpus", "--out", out, "--templates", "3", "--per-template", "20",
             "--entities", "20", "--seed", "4"]
        )
        assert code == 0
        assert "wrote 60 examples" in capsys.readouterr().out
        assert main(["validate", out]) == 0

    def test_generation_is_seed_stable(self, tmp_path):
        a = str(tmp_path / "a.jsonl")
        b = str(tmp_path / "b.jsonl")
        argv = ["--templates", "2", "--per-template", "5", "--entities", "5", "--seed", "9"]
        assert main(["gen-corpus", "--out", a, *argv]) == 0
        assert main(["gen-corpus", "--out", b, *argv]) == 0
        with open(a, "rb") as fa, open(b, "rb") as fb:
            assert fa.read() == fb.read()

    def test_bad_shape_is_reported(self, tmp_path, capsys):
        out = str(tmp_path / "x.jsonl")
        code = main(["gen-corpus", "--out", out, "--templates", "0"])
        assert code == 1
        assert capsys.readouterr().err.startswith("error:")


class TestSelect:
    def test_prints_a_batch(self, toy4_path, capsys):
        assert main(["select", "--corpus", toy4_path, "--strategy", "RANDOM", "--budget", "2"]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert len(lines) == 2
        assert set(lines) <= {"ex1", "ex2", "ex3", "ex4"}

    def test_writes_a_batch_file(self, toy4_path, tmp_path, capsys):
        out = str(tmp_path / "batch.txt")
        code = main(
            ["select", "--corpus", toy4_path, "--strategy", "MAX_COMPOUND",
             "--budget", "2", "--out", out]
        )
        assert code == 0
        assert "wrote 2 ids" in capsys.readouterr().out
        assert read_selection(out) == ["ex1", "ex4"]

    def test_excludes_already_translated_ids(self, toy4_path, tmp_path, capsys):
        selected = tmp_path / "done.txt"
        selected.write_text("ex1\n", encoding="utf-8")
        code = main(
            ["select", "--corpus", toy4_path, "--strategy", "LFS_LC_D",
             "--budget", "1", "--selected", str(selected)]
        )
        assert code == 0
        (chosen,) = capsys.readouterr().out.strip().splitlines()
        assert chosen in {"ex2", "ex3", "ex4"}

    def test_confidence_strategy_trains_a_parser(self, toy4_path, capsys):
        assert main(["select", "--corpus", toy4_path, "--strategy", "s2s-fw", "--budget", "2"]) == 0
        assert len(capsys.readouterr().out.strip().splitlines()) == 2

    def test_unknown_selected_id_is_reported(self, toy4_path, tmp_path, capsys):
        selected = tmp_path / "done.txt"
        selected.write_text("ghost\n", encoding="utf-8")
        code = main(
            ["select", "--corpus", toy4_path, "--strategy", "RANDOM",
             "--budget", "1", "--selected", str(selected)]
        )
        assert code == 1
        assert "not in corpus" in capsys.readouterr().err

    def test_unknown_strategy_is_reported(self, toy4_path, capsys):
        code = main(["select", "--corpus", toy4_path, "--strategy", "GREEDY", "--budget", "1"])
        assert code == 1
        assert "unknown strategy" in capsys.readouterr().err

    def test_zero_budget_is_reported(self, toy4_path, capsys):
        code = main(["select", "--corpus", toy4_path, "--strategy", "RANDOM", "--budget", "0"])
        assert code == 1
        assert "batch size" in capsys.readouterr().err


def write_sim_config(tmp_path, corpus_path, **overrides):
    lines = {
        "corpus": corpus_path,
        "strategy": "RANDOM",
        "budget_percents": "25,50",
        "seed": "2",
    }
    lines.update(overrides)
    path = tmp_path / "campaign.conf"
    path.write_text(
        "".join(f"{k} = {v}\n" for k, v in lines.items()), encoding="utf-8"
    )
    return str(path)


class TestSimulate:
    def test_writes_metrics_and_selections(self, toy4_path, tmp_path, capsys):
        config = write_sim_config(tmp_path, toy4_path)
        out_dir = str(tmp_path / "run")
        assert main(["simulate", "--config", config, "--out-dir", out_dir]) == 0
        out = capsys.readouterr().out
        assert "round 0:" in out and "round 2:" in out
        assert "metrics written to" in out
        records = read_metrics(os.path.join(out_dir, "metrics.jsonl"))
        assert len(records) == 3
        assert all(r["seed"] == 2 for r in records)
        assert read_selection(os.path.join(out_dir, "selection_round_01.txt"))
        assert read_selection(os.path.join(out_dir, "selection_round_02.txt"))

    def test_seed_flag_overrides_config(self, toy4_path, tmp_path):
        config = write_sim_config(tmp_path, toy4_path)
        out_dir = str(tmp_path / "run")
        assert main(["simulate", "--config", config, "--out-dir", out_dir, "--seed", "7"]) == 0
        records = read_metrics(os.path.join(out_dir, "metrics.jsonl"))
        assert all(r["seed"] == 7 for r in records)

    def test_report_flag_renders_figures(self, toy4_path, tmp_path, capsys):
        config = write_sim_config(tmp_path, toy4_path)
        out_dir = str(tmp_path / "run")
        assert main(["simulate", "--config", config, "--out-dir", out_dir, "--report"]) == 0
        assert capsys.readouterr().out.count("figure written to") == 3
        for suffix in ("accuracy_source", "accuracy_target", "coverage"):
            assert os.path.getsize(os.path.join(out_dir, f"campaign_{suffix}.png")) > 0

    def test_interactive_oracle_is_refused(self, toy4_path, tmp_path, capsys):
        config = write_sim_config(tmp_path, toy4_path, oracle="human")
        code = main(["simulate", "--config", config, "--out-dir", str(tmp_path / "run")])
        assert code == 1
        assert "oracle = gold" in capsys.readouterr().err

    def test_config_without_corpus_is_refused(self, tmp_path, capsys):
        path = tmp_path / "campaign.conf"
        path.write_text("strategy = RANDOM\n", encoding="utf-8")
        code = main(["simulate", "--config", str(path), "--out-dir", str(tmp_path / "run")])
        assert code == 1
        assert "must set `corpus`" in capsys.readouterr().err


class TestTune:
    def make_corpus(self, tmp_path):
        out = str(tmp_path / "pool.jsonl")
        assert (
            main(["gen-corpus", "--out", out, "--templates", "3", "--per-template", "20",
                  "--entities", "20", "--seed", "4"])
            == 0
        )
        return out

    def test_single_cell_grid(self, tmp_path, capsys):
        corpus = self.make_corpus(tmp_path)
        grid = tmp_path / "grid.conf"
        grid.write_text("alphas = 0.5\nbetas = 0.25\n", encoding="utf-8")
        table_out = str(tmp_path / "table.jsonl")
        code = main(["tune", "--corpus", corpus, "--grid", str(grid), "--out", table_out])
        assert code == 0
        out = capsys.readouterr().out
        assert "best: alpha=0.5 beta=0.25 (1 cycles)" in out
        rows = read_metrics(table_out)
        assert len(rows) == 1
        assert rows[0]["alpha"] == 0.5

    def test_unknown_grid_key_is_reported(self, tmp_path, capsys):
        corpus = self.make_corpus(tmp_path)
        grid = tmp_path / "grid.conf"
        grid.write_text("gamma = 1\n", encoding="utf-8")
        assert main(["tune", "--corpus", corpus, "--grid", str(grid)]) == 1
        assert "unknown grid keys" in capsys.readouterr().err


class TestReport:
    def test_aggregates_and_renders(self, toy4_path, tmp_path, capsys):
        config = write_sim_config(tmp_path, toy4_path)
        run_a = str(tmp_path / "a")
        run_b = str(tmp_path / "b")
        assert main(["simulate", "--config", config, "--out-dir", run_a, "--seed", "1"]) == 0
        assert main(["simulate", "--config", config, "--out-dir", run_b, "--seed", "2"]) == 0
        capsys.readouterr()

        report_dir = str(tmp_path / "report")
        code = main(
            ["report", "--metrics", os.path.join(run_a, "metrics.jsonl"),
             os.path.join(run_b, "metrics.jsonl"), "--out-dir", report_dir]
        )
        assert code == 0
        out = capsys.readouterr().out
        assert "summary written to" in out
        assert out.count("figure written to") == 3
        summary = read_metrics(os.path.join(report_dir, "summary.jsonl"))
        assert all(row["runs"] == 2 for row in summary)
        assert {row["cumulative_budget"] for row in summary} == {0, 1, 2}

    def test_empty_metrics_refused(self, tmp_path, capsys):
        empty = tmp_path / "empty.jsonl"
        empty.write_text("", encoding="utf-8")
        code = main(["report", "--metrics", str(empty), "--out-dir", str(tmp_path / "r")])
        assert code == 1
        assert "no records" in capsys.readouterr().err
