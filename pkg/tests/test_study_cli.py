"""Study-runner and command-line tests: schema-stable outputs, determinism
across re-runs and worker pools, config handling, and error reporting.

Study runs here use tiny chains; statistical quality is covered elsewhere.
"""

import json
import os
import subprocess
import sys

import numpy as np
import pytest

from ghs.cli import main
from ghs.study import GAMMA_HEADER, MISCLASS_HEADER, StudyConfig, load_reports, run_study

TINY_STUDY = {
    "n": [150],
    "sigma_eps": [0.5],
    "replications": 2,
    "seed": 11,
    "d_lin": 1,
    "d_nl": 3,
    "basis_size": 4,
    "iters": 120,
    "burn": 30,
}


def read(path):
    with open(path, encoding="utf-8") as fh:
        return fh.read()


class TestStudyConfig:
    def test_paper_grid_has_twelve_cells(self):
        config = StudyConfig()
        assert len(config.scenarios) == 12
        assert config.n == (500, 1000, 2000)
        assert config.sigma_eps == (0.25, 0.5, 1.0, 2.0)

    def test_default_truth_pattern(self):
        config = StudyConfig()
        assert config.truth.count("zero") == 10
        assert config.truth.count("linear") == 10
        assert config.truth.count("non-linear") == 10

    def test_unknown_field_rejected(self):
        from ghs.errors import ConfigError

        with pytest.raises(ConfigError):
            StudyConfig.from_dict({"bogus_knob": 1})

    def test_roundtrip_through_dict(self):
        config = StudyConfig.from_dict(TINY_STUDY)
        again = StudyConfig.from_dict(config.to_dict())
        assert again == config


class TestStudyRunner:
    def test_outputs_and_determinism(self, tmp_path):
        config = StudyConfig.from_dict(TINY_STUDY)
        out1, out2 = tmp_path / "a", tmp_path / "b"
        records1, failures1 = run_study(config, out1)
        records2, _ = run_study(config, out2)
        assert not failures1
        assert len(records1) == 2
        assert read(out1 / "misclassification.csv") == read(out2 / "misclassification.csv")
        assert read(out1 / "gamma_values.csv") == read(out2 / "gamma_values.csv")
        assert records1 == records2

    def test_aggregate_schema(self, tmp_path):
        config = StudyConfig.from_dict(TINY_STUDY)
        run_study(config, tmp_path / "run")
        mis = read(tmp_path / "run" / "misclassification.csv").splitlines()
        assert mis[0] == MISCLASS_HEADER
        assert len(mis) == 1 + 2 * 2  # two methods x two replications
        gam = read(tmp_path / "run" / "gamma_values.csv").splitlines()
        assert gam[0] == GAMMA_HEADER
        assert len(gam) == 1 + 2 * 4  # two replications x four predictors
        manifest = json.loads(read(tmp_path / "run" / "manifest.json"))
        assert manifest["completed"] == 2 and manifest["failed"] == []

    def test_parallel_schedule_independent(self, tmp_path):
        serial = StudyConfig.from_dict(TINY_STUDY)
        parallel = StudyConfig.from_dict({**TINY_STUDY, "threads": 2})
        run_study(serial, tmp_path / "s")
        run_study(parallel, tmp_path / "p")
        assert read(tmp_path / "s" / "misclassification.csv") == read(
            tmp_path / "p" / "misclassification.csv"
        )

    def test_load_reports_matches_records(self, tmp_path):
        config = StudyConfig.from_dict(TINY_STUDY)
        records, _ = run_study(config, tmp_path / "run")
        loaded = load_reports(tmp_path / "run")
        assert loaded == records

    def test_save_chains_writes_csv(self, tmp_path):
        config = StudyConfig.from_dict({**TINY_STUDY, "replications": 1, "save_chains": True})
        run_study(config, tmp_path / "run")
        chain_csv = tmp_path / "run" / "n150_sig0.5" / "rep00_chain.csv"
        lines = read(chain_csv).splitlines()
        assert lines[0].startswith("beta0,beta_1")
        assert len(lines) == 1 + (TINY_STUDY["iters"] - TINY_STUDY["burn"])

    def test_partial_failure_recorded_in_manifest(self, tmp_path, monkeypatch):
        import ghs.study as study_mod

        real = study_mod.run_replication

        def flaky(config, n, sigma, rep, out_dir=None):
            if rep == 1:
                raise RuntimeError("synthetic failure")
            return real(config, n, sigma, rep, out_dir)

        monkeypatch.setattr(study_mod, "run_replication", flaky)
        config = StudyConfig.from_dict(TINY_STUDY)
        records, failures = run_study(config, tmp_path / "run")
        assert len(records) == 1 and len(failures) == 1
        assert failures[0]["replication"] == 1
        assert "synthetic failure" in failures[0]["error"]
        manifest = json.loads(read(tmp_path / "run" / "manifest.json"))
        assert manifest["completed"] == 1
        assert manifest["failed"][0]["replication"] == 1
        # the completed replication's aggregates are still written
        assert len(read(tmp_path / "run" / "misclassification.csv").splitlines()) == 3


class TestCli:
    def run(self, *argv):
        main(list(argv))

    def test_density_grid_csv(self, tmp_path):
        out = tmp_path / "dens.csv"
        self.run("density", "--d", "2", "--grid=-3:3:0.1", "--out", str(out))
        lines = read(out).splitlines()
        assert lines[0] == "x1,x2,density,log_density"
        assert len(lines) == 1 + 61 * 61
        # largest density on the grid should sit at a point nearest the origin
        rows = [line.split(",") for line in lines[1:]]
        best = max(rows, key=lambda r: float(r[2]))
        assert abs(float(best[0])) < 0.11 and abs(float(best[1])) < 0.11

    def test_density_pole_serialization(self, tmp_path):
        pts = tmp_path / "pts.txt"
        pts.write_text("0.0\n1.0\n")
        out_csv = tmp_path / "pole.csv"
        self.run("density", "--d", "1", "--points-file", str(pts), "--out", str(out_csv))
        lines = read(out_csv).splitlines()
        assert lines[1] == "0.0,inf,inf"
        out_json = tmp_path / "pole.json"
        self.run(
            "density", "--d", "1", "--points-file", str(pts),
            "--out", str(out_json), "--format", "json",
        )
        docs = json.loads(read(out_json))
        assert docs[0]["density"] is None and docs[0]["pole"] is True
        assert docs[1]["density"] == pytest.approx(0.11719790339753267)

    def test_density_point_matches_library(self, tmp_path):
        from ghs.distribution import GhsDistribution, density

        pts = tmp_path / "p.txt"
        pts.write_text("1.0\n")
        out = tmp_path / "d.csv"
        self.run("density", "--d", "1", "--points-file", str(pts), "--out", str(out))
        val = float(read(out).splitlines()[1].split(",")[1])
        assert val == pytest.approx(density(GhsDistribution(1), [1.0]), rel=1e-12)

    def test_sample_determinism_and_schema(self, tmp_path):
        out1, out2 = tmp_path / "s1.csv", tmp_path / "s2.csv"
        for out in (out1, out2):
            self.run("sample", "--d", "3", "--n", "50", "--seed", "7", "--out", str(out))
        assert read(out1) == read(out2)
        lines = read(out1).splitlines()
        assert lines[0] == "lambda,x1,x2,x3"
        assert len(lines) == 51
        lam = np.array([float(line.split(",")[0]) for line in lines[1:]])
        assert np.all(lam > 0)

    def test_sample_requires_seed(self, tmp_path, capsys):
        with pytest.raises(SystemExit) as exc:
            self.run("sample", "--d", "1", "--n", "5", "--out", str(tmp_path / "x.csv"))
        assert exc.value.code == 1
        err = json.loads(capsys.readouterr().err)
        assert err["error"] == "ConfigError"

    def test_risk_table(self, tmp_path):
        out = tmp_path / "risk.csv"
        self.run(
            "risk", "--d-list", "1,2", "--sigma", "1.0",
            "--n-grid", "1e3,1e4", "--out", str(out),
        )
        lines = read(out).splitlines()
        assert lines[0] == "d,n,mass,bound,normalized_bound"
        assert len(lines) == 5
        rows = [line.split(",") for line in lines[1:]]
        d1 = [float(r[2]) for r in rows if r[0] == "1"]
        assert d1[1] < d1[0]  # mass decreasing in n

    def test_risk_off_origin(self, tmp_path):
        out = tmp_path / "risk2.csv"
        self.run(
            "risk", "--d-list", "2", "--theta0", "1,1",
            "--n-grid", "1e4,1e6", "--out", str(out),
        )
        rows = [line.split(",") for line in read(out).splitlines()[1:]]
        normalized = [float(r[4]) for r in rows]
        assert normalized[0] == pytest.approx(normalized[1], abs=0.01)

    def test_risk_theta0_dimension_guard(self, tmp_path, capsys):
        with pytest.raises(SystemExit):
            self.run(
                "risk", "--d-list", "1,2", "--theta0", "1,1",
                "--n-grid", "1e3", "--out", str(tmp_path / "x.csv"),
            )
        assert json.loads(capsys.readouterr().err)["error"] == "ConfigError"

    def test_simulate_and_report_roundtrip(self, tmp_path):
        cfg = tmp_path / "study.json"
        cfg.write_text(json.dumps(TINY_STUDY))
        run_dir = tmp_path / "run"
        self.run("simulate", "--config", str(cfg), "--out-dir", str(run_dir))
        assert (run_dir / "manifest.json").exists()
        rebuilt = tmp_path / "rebuilt"
        self.run("report", "--in-dir", str(run_dir), "--out-dir", str(rebuilt))
        assert read(run_dir / "misclassification.csv") == read(
            rebuilt / "misclassification.csv"
        )
        assert read(run_dir / "gamma_values.csv") == read(rebuilt / "gamma_values.csv")

    def test_simulate_seed_override_changes_results(self, tmp_path):
        cfg = tmp_path / "study.json"
        cfg.write_text(json.dumps(TINY_STUDY))
        self.run("simulate", "--config", str(cfg), "--out-dir", str(tmp_path / "a"))
        self.run(
            "simulate", "--config", str(cfg), "--out-dir", str(tmp_path / "b"),
            "--seed", "999",
        )
        assert read(tmp_path / "a" / "gamma_values.csv") != read(
            tmp_path / "b" / "gamma_values.csv"
        )

    def test_error_json_on_bad_input(self, tmp_path, capsys):
        with pytest.raises(SystemExit) as exc:
            self.run("density", "--d", "1", "--out", str(tmp_path / "o.csv"))
        assert exc.value.code == 1
        err = json.loads(capsys.readouterr().err)
        assert set(err) == {"error", "message"}

    def test_points_file_dimension_guard(self, tmp_path, capsys):
        pts = tmp_path / "pts.txt"
        pts.write_text("1.0,2.0\n")
        with pytest.raises(SystemExit):
            self.run(
                "density", "--d", "3", "--points-file", str(pts),
                "--out", str(tmp_path / "o.csv"),
            )
        assert json.loads(capsys.readouterr().err)["error"] == "DimensionError"

    def test_report_empty_dir_fails_cleanly(self, tmp_path, capsys):
        with pytest.raises(SystemExit):
            self.run("report", "--in-dir", str(tmp_path))
        assert json.loads(capsys.readouterr().err)["error"] == "ConfigError"

    def test_entry_point_subprocess(self, tmp_path):
        # exit code 0 and stable bytes through the installed console script
        out = tmp_path / "cli.csv"
        res = subprocess.run(
            [sys.executable, "-m", "ghs.cli", "sample", "--d", "1", "--n", "3",
             "--seed", "1", "--out", str(out)],
            capture_output=True,
            text=True,
        )
        assert res.returncode == 0
        assert read(out).splitlines()[0] == "lambda,x1"
