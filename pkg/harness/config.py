"""Config loading: files -> normalized dicts -> EvolutionSpec.

Usage (from Python):
    from harness.config import load_config, build_spec
    config = load_config("configs/qubit_linear.json")
    spec = build_spec(config)

JSON is the primary format; `.yaml` / `.yml` files are read with PyYAML.
Every failure surfaces as ConfigViolation whose message starts with the
file path and either a line:col position (syntax) or a field path (schema).
"""

from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import yaml

from contracts.config_validator import ConfigViolation, validate_config
from core.dynamics import EvolutionSpec
from core.errors import DomainError, SchemaError
from core.matrixcore import DensityMatrix, HermitianMatrix, random_density
from core.rng import resolve_seed
from core.schema import normalize_config, parse_matrix_literal, parse_shape, spec_from_dict

logger = logging.getLogger(__name__)

_DEFAULT_TOLERANCES = (
    Path(__file__).resolve().parent.parent / "data" / "knowledge" / "tolerances.yaml"
)


def load_tolerances(yaml_path: Optional[str] = None) -> Dict[str, Any]:
    """Tolerances and verify-suite budgets from data/knowledge/tolerances.yaml."""
    path = Path(yaml_path) if yaml_path else _DEFAULT_TOLERANCES
    with open(path, "r") as f:
        data = yaml.safe_load(f) or {}
    data.setdefault("tolerances", {})
    data.setdefault("verify", {}).setdefault("suites", {})
    return data


def profile_names(tolerances: Optional[Dict[str, Any]] = None) -> List[str]:
    data = tolerances or load_tolerances()
    return sorted(data["verify"].get("profiles") or {})


def suite_settings(
    name: str,
    tolerances: Optional[Dict[str, Any]] = None,
    profile: Optional[str] = None,
) -> Dict[str, Any]:
    """Settings block for one verify suite, numbers coerced to float/int.

    A `profile` overlays verify.profiles.<profile>.<name> on the suite block.
    """
    data = tolerances or load_tolerances()
    raw = dict(data["verify"]["suites"].get(name, {}))
    if profile is not None:
        profiles = data["verify"].get("profiles") or {}
        if profile not in profiles:
            raise KeyError(f"unknown profile {profile!r}; expected one of {', '.join(sorted(profiles)) or 'none'}")
        raw.update(profiles[profile].get(name) or {})
    out: Dict[str, Any] = {}
    for key, value in raw.items():
        if key in ("trials", "record_every"):
            out[key] = int(value)
        elif key == "property_trials":
            out[key] = {str(prop): int(n) for prop, n in value.items()}
        else:
            out[key] = float(value)
    return out


def read_config_file(path: str) -> Dict[str, Any]:
    """Parse a JSON or YAML config file into a dict."""
    p = Path(path)
    if not p.exists():
        raise ConfigViolation(["config file not found"], source=str(p))
    text = p.read_text()
    try:
        if p.suffix.lower() in (".yaml", ".yml"):
            data = yaml.safe_load(text)
        else:
            data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigViolation([f"{exc.lineno}:{exc.colno}: {exc.msg}"], source=str(p)) from exc
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f"{mark.line + 1}:{mark.column + 1}: " if mark is not None else ""
        raise ConfigViolation([f"{where}{getattr(exc, 'problem', exc)}"], source=str(p)) from exc
    if not isinstance(data, dict):
        raise ConfigViolation(["top level must be an object"], source=str(p))
    return data


def load_config(path: str, trace=None) -> Dict[str, Any]:
    """Read, normalize and gate a config. Returns the normalized dict
    with gate results under the "_gate" key."""
    raw = read_config_file(path)
    config = normalize_config(raw)
    gate = validate_config(config, trace=trace, source=str(path))
    for warning in gate["warnings"]:
        logger.warning("%s: %s", path, warning)
    config["_source"] = str(path)
    config["_gate"] = gate
    return config


def _random_field(spec: Dict[str, Any], key: str, cast, default: Any = None) -> Any:
    value = spec.get(key, default)
    if isinstance(value, bool):
        raise SchemaError(f"rho0.random.{key}", f"expected a number, got {value!r}")
    try:
        out = cast(value)
    except (TypeError, ValueError, OverflowError):
        raise SchemaError(f"rho0.random.{key}", f"expected a number, got {value!r}") from None
    if cast is int and out != value:
        raise SchemaError(f"rho0.random.{key}", f"expected an integer, got {value!r}")
    return out


def _build_rho0(raw: Any) -> DensityMatrix:
    if isinstance(raw, dict) and "random" in raw:
        spec = raw["random"]
        if not isinstance(spec, dict) or "dim" not in spec:
            raise SchemaError("rho0.random", "needs at least 'dim'")
        dim = _random_field(spec, "dim", int)
        seed = resolve_seed(_random_field(spec, "seed", int, 0))
        rank = _random_field(spec, "rank", int, dim)
        floor = _random_field(spec, "min_eigenvalue", float, 1e-6)
        logger.info("drawing rho0: dim=%d rank=%d seed=%d", dim, rank, seed)
        return random_density(dim, rank, seed, min_eigenvalue=floor)
    try:
        return DensityMatrix(parse_matrix_literal(raw, "rho0"))
    except SchemaError:
        raise
    except DomainError as exc:
        raise SchemaError("rho0", str(exc)) from exc


def _build_hermitian(raw: Any, field: str) -> HermitianMatrix:
    try:
        return HermitianMatrix(parse_matrix_literal(raw, field))
    except SchemaError:
        raise
    except DomainError as exc:
        raise SchemaError(field, str(exc)) from exc


def build_spec(config: Dict[str, Any]) -> EvolutionSpec:
    """EvolutionSpec from a normalized, gated config.

    Raises ConfigViolation for anything the matrices or generator reject.
    """
    source = config.get("_source", "<config>")
    try:
        shape = parse_shape(config.get("shape"))
        rho0 = _build_rho0(config["rho0"])
        hamiltonian = _build_hermitian(config["hamiltonian"], "hamiltonian")
        generator = spec_from_dict(config["generator"], shape)
        observables = tuple(
            (str(o.get("label", f"obs{i}")), _build_hermitian(o.get("matrix"), f"outputs[{i}].matrix"))
            for i, o in enumerate(config.get("outputs") or [])
        )
        return EvolutionSpec(
            hamiltonian=hamiltonian,
            generator=generator,
            rho0=rho0,
            t_final=float(config["t_final"]),
            dt=float(config["dt"]),
            record_every=int(config["record_every"]),
            tolerance=float(config["tolerance"]),
            normalize=bool(config["normalize"]),
            observables=observables,
        )
    except DomainError as exc:
        raise ConfigViolation([str(exc)], source=source) from exc


def load_spec(path: str, trace=None) -> Tuple[Dict[str, Any], EvolutionSpec]:
    config = load_config(path, trace=trace)
    return config, build_spec(config)
