"""
End-to-end tests: every subcommand through the `gah` dispatcher.

The pipeline fixture runs the commands in the order an operator would,
each reading what the previous ones wrote.
"""

import json

import pandas as pd
import pytest

from apps.core.cli import SUBCOMMANDS, dispatch
from apps.dataset.io import read_fvecs, read_ivecs, read_permutation
from apps.graphs.io import load_graph


def gah(*argv):
    return dispatch([str(a) for a in argv])


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    """Small dataset, ground truth and graphs built through the CLI."""
    root = tmp_path_factory.mktemp("cli")
    assert gah("make-dataset", "--count", 300, "--dim", 4, "--queries", 10, "--seed", 7,
               "--out-base", root / "base.fvecs", "--out-query", root / "query.fvecs") == 0
    assert gah("compute-gt", "--base", root / "base.fvecs", "--query", root / "query.fvecs",
               "--k", 10, "--out", root / "gt.ivecs", "--dists", root / "gt_dists.fvecs") == 0
    assert gah("build-graph", "--type", "kgraph", "--K", 8, "--base", root / "base.fvecs",
               "--out", root / "kgraph.bin") == 0
    assert gah("build-graph", "--type", "mrng", "--efc", 32, "--base", root / "base.fvecs",
               "--out", root / "mrng.bin", "--reverse-out", root / "mrng.rev.bin") == 0
    assert gah("build-graph", "--type", "hnsw", "--M", 4, "--ef-construction", 20, "--shuffle",
               "--seed", 3, "--base", root / "base.fvecs", "--out", root / "hnsw.bin",
               "--permutation", root / "hnsw.perm.ivecs") == 0
    return root


@pytest.mark.e2e
class TestDispatcher:
    """Tests for exit codes of the dispatcher."""

    def test_main_help(self, capsys):
        assert gah("--help") == 0

    def test_subcommand_help(self, capsys):
        assert gah("build-graph", "--help") == 0
        assert "--ef-construction" in capsys.readouterr().out

    def test_unknown_subcommand(self, capsys):
        assert gah("no-such-command") == 1

    def test_unknown_flag(self, capsys):
        assert gah("build-graph", "--type", "kgraph", "--bogus") == 1

    def test_missing_required_flag(self, capsys):
        assert gah("compute-gt", "--k", 5) == 1

    def test_invalid_choice(self, capsys):
        assert gah("build-graph", "--type", "nsg", "--base", "b.fvecs", "--out", "g.bin") == 1

    def test_missing_input_file(self, tmp_path, capsys):
        assert gah("graph-stats", "--graph", tmp_path / "absent.bin") == 2

    def test_every_subcommand_is_registered(self, capsys):
        for name in SUBCOMMANDS:
            assert gah(name, "--help") == 0


@pytest.mark.e2e
class TestDataAndGraphs:
    """Tests for dataset and graph commands."""

    def test_dataset_files(self, workdir):
        base = read_fvecs(workdir / "base.fvecs")
        assert (base.count, base.dim) == (300, 4)
        gt = read_ivecs(workdir / "gt.ivecs")
        assert len(gt) == 10
        assert all(len(row) == 10 for row in gt)

    def test_graph_files(self, workdir):
        kgraph = load_graph(workdir / "kgraph.bin")
        assert kgraph.count == 300
        assert set(kgraph.out_degrees().tolist()) == {8}
        assert load_graph(workdir / "mrng.rev.bin").edge_count == load_graph(workdir / "mrng.bin").edge_count
        order = read_permutation(workdir / "hnsw.perm.ivecs")
        assert order.size == 300

    def test_graph_stats(self, workdir, capsys):
        out = workdir / "stats.json"
        assert gah("graph-stats", "--graph", workdir / "mrng.bin", "--base", workdir / "base.fvecs",
                   "--overlap-k", "4,8", "--out", out) == 0
        report = json.loads(out.read_text())
        assert report["provenance"].startswith("# gah ")
        assert set(report["overlap"]) == {"4", "8"}

    def test_overlap_needs_base(self, workdir, capsys):
        assert gah("graph-stats", "--graph", workdir / "mrng.bin", "--overlap-k", "4") == 1


@pytest.mark.e2e
class TestHardnessCommands:
    """Tests for critical radius, ME and hardness tables."""

    def test_delta0(self, workdir, capsys):
        out = workdir / "delta0.csv"
        assert gah("delta0", "--graph", workdir / "mrng.bin", "--revgraph", workdir / "mrng.rev.bin",
                   "--base", workdir / "base.fvecs", "--query", workdir / "query.fvecs",
                   "--k", 5, "--acc", 0.8, "--p", 0.8, "--out", out) == 0
        frame = pd.read_csv(out, comment="#")
        assert len(frame) == 10
        ok = frame[frame["status"] == "ok"]
        assert (ok["delta0"] >= 0).all()
        assert out.read_text().startswith("# gah ")

    @pytest.mark.parametrize("variant", ["basic", "constrained", "exhaustive"])
    def test_me_variants(self, workdir, variant, capsys):
        out = workdir / f"me_{variant}.csv"
        assert gah("me", "--graph", workdir / "mrng.bin", "--base", workdir / "base.fvecs",
                   "--query", workdir / "query.fvecs", "--k", 5, "--acc", 0.8, "--p", 0.8,
                   "--variant", variant, "--radius", "0.5", "--out", out) == 0
        frame = pd.read_csv(out, comment="#")
        assert (frame["variant"] == variant).all()

    def test_me_rejects_negative_radius(self, workdir, capsys):
        assert gah("me", "--graph", workdir / "mrng.bin", "--base", workdir / "base.fvecs",
                   "--query", workdir / "query.fvecs", "--radius", "-1",
                   "--out", workdir / "bad.csv") == 1

    def test_hardness_needs_mrng_for_steiner(self, workdir, capsys):
        assert gah("hardness", "--base", workdir / "base.fvecs", "--query", workdir / "query.fvecs",
                   "--measures", "steiner", "--out", workdir / "bad.csv") == 1

    def test_hardness_rejects_unknown_measure(self, workdir, capsys):
        assert gah("hardness", "--base", workdir / "base.fvecs", "--query", workdir / "query.fvecs",
                   "--measures", "lid,magic", "--out", workdir / "bad.csv") == 1


@pytest.mark.e2e
class TestEffortPipeline:
    """Hardness, effort, correlation and reports chained through files."""

    @pytest.fixture(scope="class")
    def tables(self, workdir):
        hardness = workdir / "hardness.csv"
        effort = workdir / "effort.csv"
        assert gah("hardness", "--mrng", workdir / "mrng.bin", "--base", workdir / "base.fvecs",
                   "--query", workdir / "query.fvecs", "--k", 5, "--acc", 0.8, "--p", 0.8,
                   "--measures", "steiner,lid,rc,qe,eps", "--out", hardness) == 0
        assert gah("measure-effort", "--graph", workdir / "hnsw.bin", "--base", workdir / "base.fvecs",
                   "--query", workdir / "query.fvecs", "--gt", workdir / "gt.ivecs", "--k", 5,
                   "--recall", "0.8,1.0", "--entry", "random", "--repeats", 2, "--seed", 1,
                   "--phase-ef", 32, "--phase-out", workdir / "phases.csv", "--out", effort) == 0
        return hardness, effort

    def test_tables(self, tables, workdir):
        hardness = pd.read_csv(tables[0], comment="#")
        assert len(hardness) == 10
        assert {"steiner", "lid", "rc", "qe", "epsilon_hardness"} <= set(hardness.columns)
        effort = pd.read_csv(tables[1], comment="#")
        assert sorted(effort["target"].unique().tolist()) == [0.8, 1.0]
        assert len(effort) == 20
        assert (workdir / "phases.csv").exists()

    def test_correlate(self, tables, workdir, capsys):
        out = workdir / "corr.json"
        assert gah("correlate", "--hardness", tables[0], "--effort", tables[1], "--out", out) == 0
        rows = json.loads(out.read_text())["correlations"]
        assert {row["target"] for row in rows} == {0.8, 1.0}
        assert {"steiner", "lid"} <= {row["measure"] for row in rows}

    def test_summarize_ndc(self, tables, workdir, capsys):
        out = workdir / "ndc_summary.csv"
        assert gah("summarize-ndc", "--effort", tables[1], "--out", out) == 0
        summary = pd.read_csv(out, comment="#")
        assert summary["queries"].tolist() == [10, 10]
        assert json.loads(out.with_suffix(".json").read_text())["summary"]
        assert gah("summarize-ndc", "--effort", tables[1], "--recall", "0.5",
                   "--out", workdir / "none.csv") == 2

    def test_split_queries(self, tables, workdir, capsys):
        out = workdir / "split.json"
        assert gah("split-queries", "--hardness", tables[0], "--n", 3, "--measure", "lid",
                   "--out", out, "--query", workdir / "query.fvecs",
                   "--out-simple", workdir / "simple.fvecs", "--out-hard", workdir / "hard.fvecs") == 0
        split = json.loads(out.read_text())
        assert len(split["simple"]) == len(split["hard"]) == 3
        assert not set(split["simple"]) & set(split["hard"])
        assert read_fvecs(workdir / "hard.fvecs").count == 3

    def test_split_needs_output(self, tables, capsys):
        assert gah("split-queries", "--hardness", tables[0], "--n", 3) == 1


@pytest.mark.e2e
@pytest.mark.slow
class TestWorkloadAndBenchmark:
    """Tests for workload generation and the experiment command."""

    def test_gen_workload(self, workdir, capsys):
        report = workdir / "workload.json"
        assert gah("gen-workload", "--base", workdir / "base.fvecs", "--mrng", workdir / "mrng.bin",
                   "--Q", 12, "--h", 3, "--components", 2, "--oversample", 5,
                   "--k", 5, "--acc", 0.8, "--p", 0.8, "--seed", 4,
                   "--out-queries", workdir / "workload.fvecs",
                   "--out-hardness", workdir / "workload.csv", "--report", report) == 0
        data = json.loads(report.read_text())
        assert data["candidates"] == 60
        assert read_fvecs(workdir / "workload.fvecs").count == data["selected"]
        assert data["selected"] + data["total_deficit"] == 12

    def test_gen_workload_rejects_bad_segments(self, workdir, capsys):
        assert gah("gen-workload", "--base", workdir / "base.fvecs", "--mrng", workdir / "mrng.bin",
                   "--Q", 2, "--h", 5, "--out-queries", workdir / "w.fvecs",
                   "--out-hardness", workdir / "w.csv") == 1

    def test_benchmark(self, tmp_path, capsys):
        config = tmp_path / "exp.toml"
        config.write_text(
            'synthetic_count = 200\n'
            'synthetic_dim = 4\n'
            'synthetic_queries = 8\n'
            'index = "kgraph"\n'
            'K = 8\n'
            'instances = 2\n'
            'k = 5\n'
            'recall_targets = [0.8]\n'
            'measures = ["lid", "qe"]\n'
        )
        out_dir = tmp_path / "results"
        assert gah("benchmark", "--config", config, "--out-dir", out_dir, "--seed", 9) == 0
        assert json.loads((out_dir / "status.json").read_text())["status"] == "completed"
        assert (out_dir / "correlations.csv").exists()

    def test_benchmark_rejects_unknown_keys(self, tmp_path, capsys):
        config = tmp_path / "exp.toml"
        config.write_text('efSearch = 10\n')
        assert gah("benchmark", "--config", config, "--out-dir", tmp_path / "r") == 1

    def test_background_needs_record(self, tmp_path, capsys):
        config = tmp_path / "exp.toml"
        config.write_text('k = 5\n')
        assert gah("benchmark", "--config", config, "--out-dir", tmp_path / "r", "--background") == 1


@pytest.mark.django_db
@pytest.mark.e2e
class TestRecordedBenchmark:
    """Tests for benchmark runs tracked as ExperimentRun records."""

    def test_record(self, tmp_path, capsys):
        from apps.evalharness.models import ExperimentRun

        config = tmp_path / "exp.toml"
        config.write_text(
            'synthetic_count = 150\n'
            'synthetic_dim = 3\n'
            'synthetic_queries = 6\n'
            'index = "mrng"\n'
            'index_efc = 16\n'
            'instances = 1\n'
            'k = 3\n'
            'recall_targets = [1.0]\n'
            'measures = ["lid"]\n'
        )
        assert gah("benchmark", "--config", config, "--out-dir", tmp_path / "r", "--record") == 0
        run = ExperimentRun.objects.get()
        assert run.status == ExperimentRun.Status.COMPLETED
        assert run.config["index"] == "mrng"
