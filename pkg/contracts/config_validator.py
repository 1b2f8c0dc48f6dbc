"""Config validator: the gate between a config file and a simulation.

Two tiers:
- HARD: structural and numeric rules; any violation raises ConfigViolation
  and the CLI exits with code 1 before anything is integrated.
- SOFT: advisories (pathological orders, very long runs); recorded as
  warnings in the report, never fatal.

Rules take the normalized config dict and return None or a message that
starts with the offending field path. Matrix-level checks (Hermiticity,
positivity, matching dimensions) happen when the config is built into an
EvolutionSpec; see harness.config.
"""

import math
from typing import Any, Callable, Dict, List, Optional

from core.schema import CANONICAL_GENERATOR_KINDS, normalize_generator_kind


class ConfigViolation(Exception):
    """Raised when a HARD config rule fails."""

    def __init__(self, violations: List[str], tier: str = "hard", source: str = "<config>"):
        self.violations = violations
        self.tier = tier
        self.source = source
        super().__init__(f"{source}: " + "; ".join(violations))


GATE_TIERS = {
    "schema": "hard",
    "advisory": "soft",
}

# Step counts above this get an advisory.
MAX_QUIET_STEPS = 1_000_000


def _number(config: Dict, key: str) -> Optional[float]:
    value = config.get(key)
    if isinstance(value, bool):
        return None
    try:
        return float(value)
    except (TypeError, ValueError):
        return None


# =============================================================================
# HARD rules
# =============================================================================

def rule_required_fields(config: Dict, **kwargs) -> Optional[str]:
    missing = [k for k in ("hamiltonian", "rho0", "generator", "t_final", "dt") if k not in config]
    if missing:
        return f"missing required fields: {', '.join(missing)}"
    return None


def rule_dt_positive(config: Dict, **kwargs) -> Optional[str]:
    if "dt" not in config:
        return None
    dt = _number(config, "dt")
    if dt is None or not math.isfinite(dt) or dt <= 0.0:
        return f"dt: must be a positive number, got {config.get('dt')!r}"
    return None


def rule_t_final_nonnegative(config: Dict, **kwargs) -> Optional[str]:
    if "t_final" not in config:
        return None
    t = _number(config, "t_final")
    if t is None or not math.isfinite(t) or t < 0.0:
        return f"t_final: must be a number >= 0, got {config.get('t_final')!r}"
    return None


def rule_dt_within_t_final(config: Dict, **kwargs) -> Optional[str]:
    dt, t = _number(config, "dt"), _number(config, "t_final")
    if dt is None or t is None:
        return None
    if t > 0.0 and dt > t:
        return f"dt: step {dt:g} exceeds t_final {t:g}"
    return None


def rule_record_every_positive(config: Dict, **kwargs) -> Optional[str]:
    value = config.get("record_every", 1)
    if isinstance(value, bool) or not isinstance(value, int) or value < 1:
        return f"record_every: must be a positive integer, got {value!r}"
    return None


def rule_tolerance_positive(config: Dict, **kwargs) -> Optional[str]:
    tol = _number(config, "tolerance")
    if tol is None or not tol > 0.0:
        return f"tolerance: must be a positive number, got {config.get('tolerance')!r}"
    return None


def _walk_generators(gen: Any, field: str = "generator"):
    if not isinstance(gen, dict):
        return
    yield field, gen
    for i, part in enumerate(gen.get("parts") or []):
        if isinstance(part, dict):
            yield from _walk_generators(part.get("generator"), f"{field}.parts[{i}].generator")


def rule_generator_kind_known(config: Dict, **kwargs) -> Optional[str]:
    gen = config.get("generator")
    if "generator" in config and not isinstance(gen, dict):
        return "generator: must be an object with a 'kind'"
    for field, spec in _walk_generators(gen):
        raw = spec.get("kind", "")
        if not isinstance(raw, str):
            return f"{field}.kind: must be a string, got {type(raw).__name__}"
        if normalize_generator_kind(raw) not in CANONICAL_GENERATOR_KINDS:
            return f"{field}.kind: unknown generator kind {spec.get('kind')!r}"
    return None


def rule_alpha_valid(config: Dict, **kwargs) -> Optional[str]:
    for field, spec in _walk_generators(config.get("generator")):
        if normalize_generator_kind(spec.get("kind", "")) not in ("renyi_hom", "renyi_pure"):
            continue
        alpha = _number(spec, "alpha")
        if alpha is None:
            return f"{field}.alpha: required for {spec.get('kind')}"
        if not math.isfinite(alpha) or alpha <= 0.0 or alpha == 1.0:
            return f"{field}.alpha: must be > 0 and != 1, got {alpha:g}"
    return None


def rule_composite_weights(config: Dict, **kwargs) -> Optional[str]:
    for field, spec in _walk_generators(config.get("generator")):
        if normalize_generator_kind(spec.get("kind", "")) != "composite":
            continue
        parts = spec.get("parts") or []
        weights = [_number(p, "weight") for p in parts if isinstance(p, dict)]
        if not parts or any(w is None or w <= 0.0 for w in weights):
            return f"{field}.parts: every part needs a positive weight"
        if abs(sum(weights) - 1.0) > 1e-12:
            return f"{field}.parts: weights sum to {sum(weights):.15g}, expected 1"
        if field != "generator":
            return f"{field}: composites cannot be nested; flatten the weights"
    return None


def rule_subsystem_parts_have_shape(config: Dict, **kwargs) -> Optional[str]:
    for field, spec in _walk_generators(config.get("generator")):
        for i, part in enumerate(spec.get("parts") or []):
            if isinstance(part, dict) and part.get("subsystem") is not None and config.get("shape") is None:
                return f"{field}.parts[{i}].subsystem: requires a top-level 'shape' [d1, d2]"
    return None


# =============================================================================
# SOFT rules
# =============================================================================

def rule_pathological_order_advisory(config: Dict, **kwargs) -> Optional[str]:
    for field, spec in _walk_generators(config.get("generator")):
        alpha = _number(spec, "alpha")
        if alpha is not None and alpha > 2.0:
            return (f"{field}.alpha: {alpha:g} > 2; the dynamics are defined, but the "
                    f"matching information gain is pathological")
    return None


def rule_step_count_advisory(config: Dict, **kwargs) -> Optional[str]:
    dt, t = _number(config, "dt"), _number(config, "t_final")
    if dt and t and dt > 0.0 and t / dt > MAX_QUIET_STEPS:
        return f"dt: {t / dt:.3g} steps requested; expect a long run"
    return None


# =============================================================================
# Rule registry
# =============================================================================

SCHEMA_RULES: List[Callable] = [
    rule_required_fields,
    rule_dt_positive,
    rule_t_final_nonnegative,
    rule_dt_within_t_final,
    rule_record_every_positive,
    rule_tolerance_positive,
    rule_generator_kind_known,
    rule_alpha_valid,
    rule_composite_weights,
    rule_subsystem_parts_have_shape,
]

ADVISORY_RULES: List[Callable] = [
    rule_pathological_order_advisory,
    rule_step_count_advisory,
]

GATE_RULES: Dict[str, List[Callable]] = {
    "schema": SCHEMA_RULES,
    "advisory": ADVISORY_RULES,
}


def _run_rules(config: Dict, rules: List[Callable], **kwargs):
    violations, checks = [], {}
    for rule in rules:
        message = rule(config, **kwargs)
        checks[rule.__name__] = message is None
        if message:
            violations.append(message)
    return violations, checks


def validate_config(
    config: Dict[str, Any],
    trace=None,
    source: str = "<config>",
    **kwargs,
) -> Dict[str, Any]:
    """Run both gates over a normalized config.

    Returns {"passed", "violations", "warnings", "checks"}. Raises
    ConfigViolation when a schema rule fails.
    """
    violations, checks = _run_rules(config, GATE_RULES["schema"], **kwargs)
    warnings, advisory_checks = _run_rules(config, GATE_RULES["advisory"], **kwargs)
    checks.update(advisory_checks)
    passed = not violations

    if trace is not None:
        trace.emit_gate(
            stage="CONFIG",
            schema="SimConfig",
            passed=passed,
            tier=GATE_TIERS["schema"] if violations else GATE_TIERS["advisory"],
            checks=checks,
            violations=violations + warnings,
        )

    if violations:
        raise ConfigViolation(violations, GATE_TIERS["schema"], source)

    return {
        "passed": passed,
        "violations": violations,
        "warnings": warnings,
        "checks": checks,
    }
