"""Tests for the config gate: hard schema rules, soft advisories, trace integration.

Covers:
- ConfigViolation exception
- validate_config() with passing and failing configs
- Gate tier behavior: hard (raises), soft (returns warnings)
- Trace integration: emit_gate called when trace provided
- Individual rules
"""

import pytest

from contracts.config_validator import (
    GATE_TIERS,
    ConfigViolation,
    rule_alpha_valid,
    rule_composite_weights,
    rule_dt_positive,
    rule_dt_within_t_final,
    rule_generator_kind_known,
    rule_pathological_order_advisory,
    rule_record_every_positive,
    rule_required_fields,
    rule_step_count_advisory,
    rule_subsystem_parts_have_shape,
    rule_t_final_nonnegative,
    rule_tolerance_positive,
    validate_config,
)
from core.schema import normalize_config
from trace.collector import RunTrace


def _config(**overrides):
    base = {
        "hamiltonian": {"pauli": "Z"},
        "rho0": {"diag": [0.5, 0.5]},
        "generator": {"kind": "renyi_hom", "alpha": 1.5},
        "t_final": 1.0,
        "dt": 1e-3,
    }
    base.update(overrides)
    return normalize_config(base)


def _composite(*weights, nested=False, subsystem=None):
    parts = [
        {"generator": {"kind": "quadratic"}, "weight": w, "subsystem": subsystem}
        for w in weights
    ]
    if nested:
        parts[0]["generator"] = {"kind": "composite", "parts": [{"generator": {"kind": "quadratic"}, "weight": 1.0}]}
    return {"kind": "composite", "parts": parts}


class TestConfigViolation:
    def test_message_names_source_and_violations(self):
        exc = ConfigViolation(["dt: bad", "t_final: bad"], source="run.json")
        assert str(exc) == "run.json: dt: bad; t_final: bad"
        assert exc.tier == "hard"
        assert exc.violations == ["dt: bad", "t_final: bad"]


class TestValidateConfig:
    def test_valid_config_passes(self):
        result = validate_config(_config())
        assert result["passed"] is True
        assert result["violations"] == []
        assert result["warnings"] == []
        assert all(result["checks"].values())

    def test_hard_violation_raises(self):
        with pytest.raises(ConfigViolation) as info:
            validate_config(_config(dt=-1.0), source="bad.json")
        assert info.value.source == "bad.json"
        assert info.value.tier == GATE_TIERS["schema"]
        assert any(v.startswith("dt:") for v in info.value.violations)

    def test_collects_every_violation(self):
        with pytest.raises(ConfigViolation) as info:
            validate_config(_config(dt=0.0, t_final=-1.0, record_every=0))
        assert len(info.value.violations) == 3

    def test_soft_advisory_returns_warnings(self):
        result = validate_config(_config(generator={"kind": "renyi_pure", "alpha": 3.0}))
        assert result["passed"] is True
        assert len(result["warnings"]) == 1
        assert "pathological" in result["warnings"][0]
        assert result["checks"]["rule_pathological_order_advisory"] is False

    def test_emits_gate_on_pass(self):
        trace = RunTrace(command="test")
        validate_config(_config(), trace=trace)
        gate = trace.gate_for_stage("CONFIG")
        assert gate["passed"] is True
        assert gate["schema"] == "SimConfig"

    def test_emits_gate_on_failure(self):
        trace = RunTrace(command="test")
        with pytest.raises(ConfigViolation):
            validate_config(_config(dt="fast"), trace=trace)
        gate = trace.gate_for_stage("CONFIG")
        assert gate["passed"] is False
        assert gate["tier"] == "hard"
        assert gate["violations"]


class TestHardRules:
    def test_required_fields(self):
        assert rule_required_fields({"dt": 1.0}).startswith("missing required fields")
        assert rule_required_fields(_config()) is None

    @pytest.mark.parametrize("dt", [0, -1e-3, "x", None, True, float("nan")])
    def test_dt_positive(self, dt):
        assert rule_dt_positive(_config(dt=dt)) is not None

    def test_t_final_may_be_zero(self):
        assert rule_t_final_nonnegative(_config(t_final=0.0)) is None
        assert rule_t_final_nonnegative(_config(t_final=-0.5)) is not None

    def test_dt_within_t_final(self):
        assert rule_dt_within_t_final(_config(dt=2.0, t_final=1.0)) is not None
        assert rule_dt_within_t_final(_config(dt=2.0, t_final=0.0)) is None

    @pytest.mark.parametrize("value", [0, 2.5, "10", True])
    def test_record_every(self, value):
        assert rule_record_every_positive(_config(record_every=value)) is not None

    def test_tolerance(self):
        assert rule_tolerance_positive(_config(tolerance=0.0)) is not None
        assert rule_tolerance_positive(_config()) is None

    def test_generator_kind(self):
        assert rule_generator_kind_known(_config(generator={"kind": "tsallis"})) is not None
        assert rule_generator_kind_known(_config(generator="quadratic")) is not None
        assert rule_generator_kind_known(_config(generator={"kind": "S2"})) is None

    @pytest.mark.parametrize("kind", [["quadratic"], {"name": "quadratic"}, 2])
    def test_generator_kind_must_be_a_string(self, kind):
        message = rule_generator_kind_known(_config(generator={"kind": kind}))
        assert message.startswith("generator.kind: must be a string")

    def test_unhashable_kind_fails_the_gate(self):
        with pytest.raises(ConfigViolation, match="generator.kind: must be a string, got list"):
            validate_config(_config(generator={"kind": ["renyi_hom"], "alpha": 1.5}))

    @pytest.mark.parametrize("alpha", [None, 1.0, 0.0, -2.0])
    def test_alpha(self, alpha):
        gen = {"kind": "renyi_hom"} if alpha is None else {"kind": "renyi_hom", "alpha": alpha}
        assert rule_alpha_valid(_config(generator=gen)).startswith("generator.alpha")

    def test_alpha_inside_composite(self):
        gen = {"kind": "composite", "parts": [{"generator": {"kind": "renyi_pure", "alpha": 1}, "weight": 1.0}]}
        assert rule_alpha_valid(_config(generator=gen)).startswith("generator.parts[0].generator.alpha")

    def test_composite_weights(self):
        assert rule_composite_weights(_config(generator=_composite(0.5, 0.5))) is None
        assert "sum to" in rule_composite_weights(_config(generator=_composite(0.5, 0.2)))
        assert "positive" in rule_composite_weights(_config(generator=_composite(1.0, 0.0)))

    def test_nested_composite(self):
        message = rule_composite_weights(_config(generator=_composite(0.5, 0.5, nested=True)))
        assert "flatten" in message

    def test_subsystem_needs_shape(self):
        gen = _composite(1.0, subsystem="first")
        assert rule_subsystem_parts_have_shape(_config(generator=gen)) is not None
        assert rule_subsystem_parts_have_shape(_config(generator=gen, shape=[2, 1])) is None


class TestSoftRules:
    def test_pathological_order(self):
        assert rule_pathological_order_advisory(_config(generator={"kind": "renyi_hom", "alpha": 2.5}))
        assert rule_pathological_order_advisory(_config(generator={"kind": "renyi_hom", "alpha": 2.0})) is None

    def test_step_count(self):
        assert rule_step_count_advisory(_config(t_final=1e4, dt=1e-3)) is not None
        assert rule_step_count_advisory(_config()) is None
