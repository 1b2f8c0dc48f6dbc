"""Tests for harness/cli.py: subcommands, exit codes and output files."""

import csv
import json
import math

import pytest

from core.infotheory import ProbDist
from harness.cli import EXIT_ALARM, EXIT_INPUT, EXIT_OK, entropy_values, main
from trace.collector import RunTrace


def _json_out(capsys):
    return json.loads(capsys.readouterr().out)


class TestUsage:
    def test_no_subcommand_is_input_error(self, capsys):
        with pytest.raises(SystemExit) as info:
            main([])
        assert info.value.code == EXIT_INPUT
        assert "usage" in capsys.readouterr().err

    def test_unknown_suite(self):
        with pytest.raises(SystemExit) as info:
            main(["verify", "--suite", "fluids"])
        assert info.value.code == EXIT_INPUT

    def test_infinite_alpha_rejected(self):
        with pytest.raises(SystemExit) as info:
            main(["entropy", "--dist", "0.5,0.5", "--alpha", "inf"])
        assert info.value.code == EXIT_INPUT


class TestEntropy:
    def test_renyi_order_two(self, capsys):
        code = main(["entropy", "--dist", "0.75,0.25", "--alpha", "2"])
        result = _json_out(capsys)
        assert code == EXIT_OK
        assert result["renyi"] == pytest.approx(0.678072, abs=1e-6)
        assert result["shannon"] == pytest.approx(0.811278, abs=1e-6)
        assert result["limit"] is False
        assert result["error"] is None

    def test_uniform_in_nats(self, capsys):
        main(["entropy", "--dist", "0.25,0.25,0.25,0.25", "--alpha", "3", "--base", str(math.e)])
        result = _json_out(capsys)
        assert result["renyi"] == pytest.approx(math.log(4.0))
        assert result["shannon"] == pytest.approx(math.log(4.0))

    def test_alpha_one_reports_limits(self):
        values = entropy_values(ProbDist([0.5, 0.5]), 1.0, 2.0)
        assert values["limit"] is True
        assert values["renyi"] == pytest.approx(1.0)
        assert values["daroczy"] == pytest.approx(1.0)

    @pytest.mark.parametrize("dist", ["0.5,0.6", "a,b", "0.5,-0.1,0.6", ""])
    def test_bad_distribution(self, dist, capsys):
        assert main(["entropy", "--dist", dist, "--alpha", "2"]) == EXIT_INPUT
        assert capsys.readouterr().err.startswith("error:")

    def test_gain_scan(self, capsys):
        main(["entropy", "--dist", "0.5,0.5", "--alpha", "2", "--scan-trials", "10", "--seed", "7"])
        scan = _json_out(capsys)["gain_scan"]
        alphas = [col["alpha"] for col in scan["columns"]]
        assert alphas == [0.5, 1.5, 2.0, 3.0]


class TestRun:
    def test_writes_csv_and_report(self, write_config, qubit_config, tmp_path, capsys):
        out = tmp_path / "out" / "traj.csv"
        code = main(["run", "--config", write_config(qubit_config), "--out", str(out)])
        report = _json_out(capsys)
        assert code == EXIT_OK
        assert report["steps"] == 1000
        assert report["records"] == 11
        assert all(c["passed"] for c in report["invariants"])
        with open(out) as f:
            rows = list(csv.reader(f))
        assert rows[0][0] == "t"
        assert len(rows) == 12

    def test_missing_config(self, tmp_path, capsys):
        code = main(["run", "--config", str(tmp_path / "nope.json"), "--out", str(tmp_path / "t.csv")])
        assert code == EXIT_INPUT
        assert "not found" in capsys.readouterr().err

    def test_schema_violation(self, write_config, qubit_config, tmp_path):
        qubit_config["dt"] = 0
        assert main(["run", "--config", write_config(qubit_config), "--out", str(tmp_path / "t.csv")]) == EXIT_INPUT

    @pytest.mark.parametrize("field, patch", [
        ("hamiltonian.coeff", {"hamiltonian": {"pauli": "Z", "coeff": "strong"}}),
        ("rho0.random.dim", {"rho0": {"random": {"dim": "two"}}}),
        ("generator.kind", {"generator": {"kind": ["renyi_hom"], "alpha": 2.0}}),
    ])
    def test_malformed_fields_are_input_errors(self, write_config, qubit_config, tmp_path, capsys, field, patch):
        qubit_config.update(patch)
        code = main(["run", "--config", write_config(qubit_config), "--out", str(tmp_path / "t.csv")])
        assert code == EXIT_INPUT
        assert field in capsys.readouterr().err

    def test_singular_initial_state(self, write_config, qubit_config, tmp_path, capsys):
        qubit_config["generator"] = {"kind": "renyi_hom", "alpha": 0.5}
        code = main(["run", "--config", write_config(qubit_config), "--out", str(tmp_path / "t.csv")])
        assert code == EXIT_INPUT
        assert "singular power" in capsys.readouterr().err

    def test_drift_alarm(self, write_config, tmp_path, capsys):
        config = {
            "hamiltonian": {"sum": [{"pauli": "X", "coeff": 4.0}, {"pauli": "Z", "coeff": 1.0}]},
            "rho0": {"diag": [0.8, 0.2]},
            "generator": {"kind": "renyi_hom", "alpha": 1.5},
            "t_final": 5.0,
            "dt": 0.25,
            "record_every": 1,
            "tolerance": 1e-12,
        }
        out = tmp_path / "partial.csv"
        code = main(["run", "--config", write_config(config), "--out", str(out)])
        report = _json_out(capsys)
        assert code == EXIT_ALARM
        assert report["alarm"]["drift"] > 1e-12
        assert out.exists()

    def test_bipartite_composite_config(self, configs_dir, tmp_path, capsys):
        out = tmp_path / "bipartite.csv"
        code = main(["run", "--config", str(configs_dir / "bipartite_composite.json"), "--out", str(out)])
        report = _json_out(capsys)
        assert code == EXIT_OK
        assert report["alarm"] is None
        assert report["records"] == 21
        monitored = [c for c in report["invariants"] if c["monitored"]]
        assert monitored[0]["quantity"] == "S_value"
        assert len(monitored) == 11
        assert all(c["passed"] for c in monitored)
        assert out.exists()

    def test_trace_out(self, write_config, qubit_config, tmp_path, capsys):
        trace_path = tmp_path / "trace.json"
        main(["run", "--config", write_config(qubit_config), "--out", str(tmp_path / "t.csv"),
              "--trace-out", str(trace_path)])
        trace = RunTrace.from_json(trace_path.read_text())
        assert trace.gate_for_stage("CONFIG")["passed"] is True
        assert trace.spans_for_stage("RUN")[-1]["decision"] == "invariant_summary"


class TestVerify:
    def test_passing_suite(self, capsys):
        code = main(["verify", "--suite", "nosignal", "--seed", "1", "--trials", "3"])
        lines = capsys.readouterr().out.splitlines()
        assert code == EXIT_OK
        assert lines[-1] == "1 passed, 0 failed, 0 report-only"

    def test_report_rows_do_not_fail(self, capsys):
        code = main(["verify", "--suite", "jacobi", "--trials", "2"])
        assert code == EXIT_OK
        assert capsys.readouterr().out.splitlines()[-1].endswith("2 report-only")

    def test_zero_trials(self, capsys):
        assert main(["verify", "--suite", "entropy", "--trials", "0"]) == EXIT_INPUT

    def test_unknown_profile(self, capsys):
        assert main(["verify", "--suite", "entropy", "--profile", "nightly"]) == EXIT_INPUT
        assert "unknown profile" in capsys.readouterr().err

    def test_profile_is_forwarded(self, monkeypatch, capsys):
        from harness import cli

        seen = {}

        def fake_run_suites(names, **kwargs):
            seen.update(kwargs)
            return []

        monkeypatch.setattr(cli, "run_suites", fake_run_suites)
        assert main(["verify", "--suite", "conservation", "--profile", "acceptance"]) == EXIT_OK
        assert seen["profile"] == "acceptance"

    def test_failed_property_exits_two(self, monkeypatch, capsys):
        from harness import cli

        failing = [{"suite": "nosignal", "property": "p", "max_deviation": 1.0, "tolerance": 1e-8,
                    "comparison": "<=", "mode": "assert", "passed": False, "trials": 1}]
        monkeypatch.setattr(cli, "run_suites", lambda *a, **k: failing)
        assert main(["verify", "--suite", "nosignal"]) == EXIT_ALARM


class TestSweep:
    def test_sweep_csv(self, write_config, qubit_config, tmp_path, capsys):
        qubit_config["t_final"] = 0.5
        out = tmp_path / "sweep.csv"
        code = main(["sweep", "--config", write_config(qubit_config), "--alphas", "1.5,0.5,2",
                     "--out", str(out)])
        result = _json_out(capsys)
        assert code == EXIT_OK
        assert [r["alpha"] for r in result["rows"]] == [1.5, 0.5, 2.0]
        with open(out) as f:
            rows = list(csv.reader(f))
        assert len(rows) == 4
        assert rows[2][-1].startswith("SingularPowerError")

    def test_bad_alpha_list(self, write_config, qubit_config, tmp_path):
        code = main(["sweep", "--config", write_config(qubit_config), "--alphas", "x",
                     "--out", str(tmp_path / "s.csv")])
        assert code == EXIT_INPUT

    def test_unsweepable_generator(self, write_config, qubit_config, tmp_path, capsys):
        qubit_config["generator"] = {"kind": "smooth_f2"}
        code = main(["sweep", "--config", write_config(qubit_config), "--alphas", "1.5",
                     "--out", str(tmp_path / "s.csv")])
        assert code == EXIT_INPUT
        assert "no alpha" in capsys.readouterr().err
