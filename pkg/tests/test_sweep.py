"""Tests for harness/sweep.py: alpha parsing and the concurrent sweep."""

import math

import pytest

from core.errors import DomainError
from harness.config import load_config
from harness.sweep import parse_alphas, run_sweep
from trace.collector import RunTrace


@pytest.fixture
def qubit_sweep_config(write_config, qubit_config):
    qubit_config["t_final"] = 0.5
    return load_config(write_config(qubit_config))


class TestParseAlphas:
    def test_list(self):
        assert parse_alphas("1.3, 1.5,2") == [1.3, 1.5, 2.0]

    def test_trailing_comma(self):
        assert parse_alphas("2,") == [2.0]

    @pytest.mark.parametrize("text", ["", " , ", "1.5,abc"])
    def test_rejects(self, text):
        with pytest.raises(DomainError):
            parse_alphas(text)


class TestRunSweep:
    def test_rows_follow_alpha_order(self, qubit_sweep_config):
        alphas = [3.0, 1.5, 2.0, 1.2]
        rows = run_sweep(qubit_sweep_config, alphas, max_workers=3)
        assert [r["alpha"] for r in rows] == alphas
        assert [r["generator"] for r in rows][1] == "renyi_hom(alpha=1.5)"

    def test_pure_state_rows_match_linear_evolution(self, qubit_sweep_config):
        rows = run_sweep(qubit_sweep_config, [1.5, 2.0, 2.5])
        for row in rows:
            assert row["error"] is None
            assert row["pure_state"] is True
            assert row["max_linear_deviation"] <= 1e-8
            assert row["max_eigenvalue_drift"] <= 1e-8
            assert set(row["final_observables"]) == {"sigma_x"}

    def test_final_observable_is_precession(self, qubit_sweep_config):
        row = run_sweep(qubit_sweep_config, [2.0])[0]
        assert row["final_observables"]["sigma_x"] == pytest.approx(math.cos(1.0), abs=1e-8)

    def test_failing_order_keeps_its_row(self, qubit_sweep_config):
        rows = run_sweep(qubit_sweep_config, [0.5, 1.0, 2.0])
        assert rows[0]["error"].startswith("SingularPowerError")
        assert rows[0]["max_eigenvalue_drift"] is None
        assert "alpha must be" in rows[1]["error"]
        assert rows[2]["error"] is None

    def test_failures_are_logged(self, qubit_sweep_config, caplog):
        run_sweep(qubit_sweep_config, [0.5])
        assert "alpha=0.5 failed" in caplog.text

    def test_config_is_not_mutated(self, qubit_sweep_config):
        run_sweep(qubit_sweep_config, [1.5])
        assert qubit_sweep_config["generator"]["alpha"] == 2.0

    def test_mixed_state_has_no_linear_comparison(self, write_config, qubit_config):
        qubit_config["rho0"] = {"diag": [0.7, 0.3]}
        qubit_config["t_final"] = 0.5
        row = run_sweep(load_config(write_config(qubit_config)), [1.5])[0]
        assert row["pure_state"] is False
        assert row["max_linear_deviation"] is None

    def test_quadratic_has_nothing_to_sweep(self, write_config, qubit_config):
        qubit_config["generator"] = {"kind": "quadratic"}
        config = load_config(write_config(qubit_config))
        with pytest.raises(DomainError, match="no alpha"):
            run_sweep(config, [1.5])

    def test_empty_alphas(self, qubit_sweep_config):
        with pytest.raises(DomainError):
            run_sweep(qubit_sweep_config, [])

    def test_rows_are_traced(self, qubit_sweep_config):
        trace = RunTrace(command="sweep")
        run_sweep(qubit_sweep_config, [1.5, 0.5], trace=trace)
        spans = trace.spans_for_stage("SWEEP")
        assert [s["value"] for s in spans] == [1.5, 0.5]
        assert [s["passed"] for s in spans] == [True, False]
