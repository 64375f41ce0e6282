"""
Integration Tests for the faircert command line
"""

import json

import pytest

from main import main
from slices.slice_general.core import read_sweep_csv
from slices.slice_stats.core import write_stats_json

pytestmark = pytest.mark.integration


@pytest.fixture
def demo_run(temp_dir):
    """Demo samples and sensitive trials written by `gen`."""
    out = temp_dir / "gen"
    code = main(["gen", "--demo-gaussian", "3000", "--trials", "40", "--seed", "7", "--out", str(out)])
    assert code == 0
    return out


class TestGenerate:
    """Tests for `faircert gen`."""

    def test_writes_samples_and_trials(self, demo_run):
        """Demo runs write samples.csv and a trials.csv with one row per trial."""
        assert (demo_run / "samples.csv").read_text().startswith("s,y,loss,shifted_loss\n")
        lines = (demo_run / "trials.csv").read_text().splitlines()
        assert lines[0] == "seed,distance,loss"
        assert len(lines) == 41

    def test_seeded_output_is_identical(self, temp_dir, demo_run):
        """Same seed, byte-identical trials."""
        again = temp_dir / "again"
        assert main(["gen", "--demo-gaussian", "3000", "--trials", "40", "--seed", "7", "--out", str(again)]) == 0
        assert (again / "trials.csv").read_bytes() == (demo_run / "trials.csv").read_bytes()

    def test_general_from_samples(self, temp_dir, demo_run):
        """General trials read shifted losses from the samples CSV."""
        out = temp_dir / "general"
        code = main([
            "gen", "--scenario", "general", "--samples", str(demo_run / "samples.csv"),
            "--trials", "10", "--seed", "1", "--out", str(out),
        ])
        assert code == 0
        assert len((out / "trials.csv").read_text().splitlines()) == 11

    def test_zero_trials(self, temp_dir):
        """Zero trials still write the header."""
        out = temp_dir / "none"
        assert main(["gen", "--demo-gaussian", "500", "--trials", "0", "--out", str(out)]) == 0
        assert (out / "trials.csv").read_text() == "seed,distance,loss\n"

    def test_rejection_budget_exhausted(self, temp_dir, monkeypatch):
        """A mixing sampler that gives up is a solver failure."""
        monkeypatch.setenv("FAIRCERT_MAX_REJECTIONS", "0")
        code = main([
            "gen", "--scenario", "general", "--demo-gaussian", "500", "--trials", "3", "--out", str(temp_dir / "x"),
        ])
        assert code == 3


class TestStatsAndCertify:
    """Tests for `faircert stats` and `faircert certify`."""

    def test_full_pipeline(self, temp_dir, demo_run, capsys):
        """stats -> certify -> validate -> plot."""
        out = temp_dir / "run"
        assert main(["stats", "--samples", str(demo_run / "samples.csv"), "--out", str(out)]) == 0
        stats = json.loads((out / "stats.json").read_text())
        assert stats["M"] == 1.0
        assert len(stats["cells"]) == 4

        code = main([
            "certify", "--stats", str(out / "stats.json"),
            "--rho-start", "0.1", "--rho-stop", "0.9", "--rho-step", "0.1", "--out", str(out),
        ])
        assert code == 0
        certificates = json.loads((out / "certificates.json").read_text())
        assert [round(c["rho"], 6) for c in certificates] == [round(0.1 * i, 6) for i in range(1, 10)]
        assert "bound=" in capsys.readouterr().out

        points = read_sweep_csv(out / "sweep.csv")
        bounds = [p.bound for p in points if p.feasible]
        assert bounds == sorted(bounds)

        code = main([
            "validate", "--sweep", str(out / "sweep.csv"), "--trials-csv", str(demo_run / "trials.csv"),
            "--lookup", "step", "--tolerance", "0.1", "--out", str(out),
        ])
        assert code == 0
        report = json.loads((out / "report.json").read_text())
        assert report["violations"] == 0
        assert report["evaluated"] + report["excluded"] == 40

        code = main([
            "plot", "--sweep", str(out / "sweep.csv"), "--trials-csv", str(demo_run / "trials.csv"),
            "--out", str(out),
        ])
        assert code == 0
        svg = (out / "plot.svg").read_text()
        assert svg.count("<polyline") == 1
        assert svg.count("<circle") == 40

    def test_general_scenario(self, temp_dir, uniform_table):
        """General certificates carry their grid and winning cell."""
        stats = temp_dir / "stats.json"
        write_stats_json(uniform_table, stats)
        out = temp_dir / "general"
        code = main([
            "certify", "--stats", str(stats), "--scenario", "general", "--granularity", "6",
            "--rho", "0.3,0.5", "--jobs", "2", "--out", str(out),
        ])
        assert code == 0
        certificates = json.loads((out / "certificates.json").read_text())
        assert all(c["T"] == 6 and c["feasible"] for c in certificates)
        assert certificates[0]["value"] <= certificates[1]["value"]

    def test_infeasible_radius_is_not_an_error(self, temp_dir, diagonal_table):
        """Infeasible radii exit 0 with an empty bound."""
        stats = temp_dir / "stats.json"
        write_stats_json(diagonal_table, stats)
        out = temp_dir / "diag"
        assert main(["certify", "--stats", str(stats), "--rho", "0.1", "--out", str(out)]) == 0
        lines = (out / "sweep.csv").read_text().splitlines()
        assert lines[1].endswith(",,false")

    def test_finite_sampling_confidence(self, temp_dir, skewed_table, capsys):
        """The overall confidence is echoed."""
        stats = temp_dir / "stats.json"
        write_stats_json(skewed_table, stats)
        code = main([
            "certify", "--stats", str(stats), "--rho", "0.3", "--finite-sampling", "--delta", "0.01",
            "--out", str(temp_dir / "fs"),
        ])
        assert code == 0
        assert "overall confidence >= 0.92" in capsys.readouterr().out

    def test_config_file(self, temp_dir, uniform_table):
        """Settings can come from a key=value file."""
        stats = temp_dir / "stats.json"
        write_stats_json(uniform_table, stats)
        cfg = temp_dir / "run.cfg"
        cfg.write_text(f"stats = {stats}\nrho = 0.2,0.4\nout = {temp_dir / 'cfg'}\n")
        assert main(["certify", "--config", str(cfg)]) == 0
        assert len(json.loads((temp_dir / "cfg" / "certificates.json").read_text())) == 2


class TestExitCodes:
    """Tests for error exit codes."""

    def test_missing_file(self, temp_dir):
        """Missing inputs exit 2."""
        assert main(["certify", "--stats", str(temp_dir / "nope.json"), "--rho", "0.2"]) == 2

    def test_bad_radius(self, temp_dir, uniform_table):
        """Radii outside (0, 1] exit 2."""
        stats = temp_dir / "stats.json"
        write_stats_json(uniform_table, stats)
        assert main(["certify", "--stats", str(stats), "--rho", "1.5", "--out", str(temp_dir)]) == 2

    def test_unbounded_loss_general(self, temp_dir):
        """General shifting with cross-entropy losses exits 2."""
        code = main([
            "certify", "--demo-gaussian", "500", "--loss", "bce", "--scenario", "general",
            "--rho", "0.3", "--granularity", "4", "--out", str(temp_dir / "bce"),
        ])
        assert code == 2

    def test_malformed_sweep(self, temp_dir, demo_run):
        """A bad sweep header exits 2."""
        sweep = temp_dir / "sweep.csv"
        sweep.write_text("radius,bound,feasible\n0.1,0.2,true\n")
        code = main(["validate", "--sweep", str(sweep), "--trials-csv", str(demo_run / "trials.csv")])
        assert code == 2

    def test_validate_needs_inputs(self, temp_dir):
        """validate without a sweep exits 2."""
        assert main(["validate", "--out", str(temp_dir)]) == 2

    def test_stats_needs_samples(self, temp_dir):
        """stats without samples exits 2."""
        assert main(["stats", "--out", str(temp_dir)]) == 2
