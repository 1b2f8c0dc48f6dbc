"""Tests for harness/config.py: config files, tolerances and EvolutionSpec building."""

import numpy as np
import pytest

from contracts.config_validator import ConfigViolation
from core.generators import Composite, RenyiHomogeneous
from core.rng import SEED_ENV_VAR
from harness.config import (
    build_spec,
    load_config,
    load_spec,
    load_tolerances,
    profile_names,
    read_config_file,
    suite_settings,
)
from trace.collector import RunTrace


class TestTolerances:
    def test_default_file(self):
        data = load_tolerances()
        assert data["verify"]["seed"] == 1
        assert data["tolerances"]["imaginary_guard"] == 1e-8
        assert set(data["verify"]["suites"]) == {"entropy", "brackets", "nosignal", "jacobi", "conservation"}

    def test_tolerance_table_matches_module_constants(self):
        from core import brackets, dynamics, matrixcore

        table = load_tolerances()["tolerances"]
        assert table["hermitian"] == matrixcore.HERMITIAN_TOL
        assert table["psd"] == matrixcore.PSD_TOL
        assert table["support_clamp"] == matrixcore.CLAMP_TOL
        assert table["fd_step"] == matrixcore.FD_STEP
        assert table["trajectory_psd"] == dynamics.TRAJECTORY_PSD_TOL
        assert table["imaginary_guard"] == brackets.IMAGINARY_GUARD
        assert table["drift_default"] == dynamics.EvolutionSpec.tolerance

    def test_suite_settings_types(self):
        settings = suite_settings("conservation")
        assert settings["trials"] == 5 and isinstance(settings["trials"], int)
        assert settings["record_every"] == 100 and isinstance(settings["record_every"], int)
        assert settings["dt"] == 1e-3 and isinstance(settings["dt"], float)

    def test_unknown_suite_is_empty(self):
        assert suite_settings("nope") == {}

    def test_custom_file(self, tmp_path):
        path = tmp_path / "tol.yaml"
        path.write_text("verify:\n  suites:\n    entropy:\n      trials: 7\n")
        data = load_tolerances(str(path))
        assert data["tolerances"] == {}
        assert suite_settings("entropy", data) == {"trials": 7}

    def test_acceptance_profile_matches_the_grid(self):
        assert profile_names() == ["acceptance"]
        conservation = suite_settings("conservation", profile="acceptance")
        assert conservation["trials"] == 20
        assert conservation["property_trials"] == {"moment_drift": 50, "time_rescaling": 10}
        assert conservation["dt"] == 1e-3
        assert suite_settings("entropy", profile="acceptance")["trials"] == 1000
        assert suite_settings("nosignal", profile="acceptance")["trials"] == 100

    def test_unknown_profile(self):
        with pytest.raises(KeyError, match="unknown profile 'nightly'"):
            suite_settings("entropy", profile="nightly")

    def test_moment_checks_run_on_the_mixed_duration(self):
        settings = suite_settings("conservation")
        assert settings["mixed_t_final"] == 5.0
        assert settings["nonlinear_t_final"] == 2.0


class TestReadConfigFile:
    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigViolation, match="not found"):
            read_config_file(str(tmp_path / "absent.json"))

    def test_json_syntax_error_has_position(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{\n  "dt": 1e-3,\n  oops\n}')
        with pytest.raises(ConfigViolation) as info:
            read_config_file(str(path))
        assert info.value.violations[0].startswith("3:3:")
        assert str(info.value).startswith(str(path))

    def test_yaml_config(self, tmp_path):
        path = tmp_path / "run.yaml"
        path.write_text("t_final: 1.0\ndt: 1.0e-3\n")
        assert read_config_file(str(path)) == {"t_final": 1.0, "dt": 1e-3}

    def test_yaml_syntax_error(self, tmp_path):
        path = tmp_path / "bad.yml"
        path.write_text("a: [1, 2\nb: 3\n")
        with pytest.raises(ConfigViolation):
            read_config_file(str(path))

    def test_top_level_must_be_object(self, tmp_path):
        path = tmp_path / "list.json"
        path.write_text("[1, 2]")
        with pytest.raises(ConfigViolation, match="top level"):
            read_config_file(str(path))


class TestLoadConfig:
    def test_normalizes_and_gates(self, write_config, qubit_config):
        path = write_config(qubit_config)
        trace = RunTrace(command="test")
        config = load_config(path, trace=trace)
        assert config["_source"] == path
        assert config["_gate"]["passed"] is True
        assert config["normalize"] is True
        assert trace.gate_for_stage("CONFIG")["passed"] is True

    def test_schema_violation(self, write_config, qubit_config):
        qubit_config["dt"] = -1
        with pytest.raises(ConfigViolation) as info:
            load_config(write_config(qubit_config))
        assert info.value.violations[0].startswith("dt:")

    def test_warnings_are_logged(self, write_config, qubit_config, caplog):
        qubit_config["generator"] = {"kind": "renyi_hom", "alpha": 3.0}
        config = load_config(write_config(qubit_config))
        assert config["_gate"]["warnings"]
        assert "pathological" in caplog.text


class TestBuildSpec:
    def test_qubit(self, write_config, qubit_config):
        config, spec = load_spec(write_config(qubit_config))
        assert spec.dim == 2
        assert spec.generator == RenyiHomogeneous(2.0)
        assert spec.n_steps == 1000
        assert [label for label, _ in spec.observables] == ["sigma_x"]

    def test_non_hermitian_hamiltonian(self, write_config, qubit_config):
        qubit_config["hamiltonian"] = [[0, 1], [0, 0]]
        with pytest.raises(ConfigViolation, match="hamiltonian"):
            load_spec(write_config(qubit_config))

    def test_non_psd_rho0(self, write_config, qubit_config):
        qubit_config["rho0"] = {"diag": [1.5, -0.5]}
        with pytest.raises(ConfigViolation, match="rho0"):
            load_spec(write_config(qubit_config))

    def test_dimension_mismatch(self, write_config, qubit_config):
        qubit_config["hamiltonian"] = {"diag": [1, 2, 3]}
        with pytest.raises(ConfigViolation, match="hamiltonian"):
            load_spec(write_config(qubit_config))

    def test_unnormalized_rho0_needs_flag(self, write_config, qubit_config):
        qubit_config["rho0"] = {"diag": [1.0, 1.0]}
        with pytest.raises(ConfigViolation, match="normalize"):
            load_spec(write_config(qubit_config))
        qubit_config["normalize"] = False
        _, spec = load_spec(write_config(qubit_config))
        assert spec.rho0.trace() == pytest.approx(2.0)

    def test_random_rho0(self, write_config, qubit_config):
        qubit_config["hamiltonian"] = {"diag": [1, 0, -1]}
        qubit_config["outputs"] = []
        qubit_config["rho0"] = {"random": {"dim": 3, "rank": 1, "seed": 7}}
        _, a = load_spec(write_config(qubit_config))
        _, b = load_spec(write_config(qubit_config))
        assert a.rho0.rank == 1
        assert np.array_equal(a.rho0.data, b.rho0.data)

    def test_seed_env_override(self, write_config, qubit_config, monkeypatch):
        qubit_config["hamiltonian"] = {"diag": [1, 0, -1]}
        qubit_config["outputs"] = []
        qubit_config["rho0"] = {"random": {"dim": 3, "seed": 7}}
        _, base = load_spec(write_config(qubit_config))
        monkeypatch.setenv(SEED_ENV_VAR, "8")
        _, overridden = load_spec(write_config(qubit_config))
        assert not np.array_equal(base.rho0.data, overridden.rho0.data)

    def test_random_rho0_needs_dim(self, write_config, qubit_config):
        qubit_config["rho0"] = {"random": {"rank": 1}}
        with pytest.raises(ConfigViolation, match="rho0.random"):
            load_spec(write_config(qubit_config))

    @pytest.mark.parametrize("key, value", [
        ("dim", "three"),
        ("dim", 2.5),
        ("rank", [1]),
        ("seed", None),
        ("min_eigenvalue", "small"),
    ])
    def test_random_rho0_fields_must_be_numbers(self, write_config, qubit_config, key, value):
        qubit_config["rho0"] = {"random": {"dim": 2, key: value}}
        with pytest.raises(ConfigViolation, match=f"rho0.random.{key}: expected"):
            load_spec(write_config(qubit_config))

    @pytest.mark.parametrize("name", [
        "qubit_linear.json",
        "pure_qutrit.json",
        "mixed_qutrit.json",
        "smooth_f2_rescaling.json",
        "bipartite_composite.json",
    ])
    def test_shipped_configs_build(self, configs_dir, name):
        _, spec = load_spec(str(configs_dir / name))
        assert spec.n_steps > 0

    def test_bipartite_composite(self, configs_dir):
        _, spec = load_spec(str(configs_dir / "bipartite_composite.json"))
        assert isinstance(spec.generator, Composite)
        assert spec.generator.shape.dim == spec.dim == 4

    def test_build_spec_names_source(self, qubit_config):
        from core.schema import normalize_config

        config = normalize_config(qubit_config)
        config["_source"] = "inline"
        config["rho0"] = {"diag": [1.0, -1.0]}
        with pytest.raises(ConfigViolation) as info:
            build_spec(config)
        assert info.value.source == "inline"
