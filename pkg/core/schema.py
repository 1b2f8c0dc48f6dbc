"""Schema normalization for simulation configs.

Provides the canonical generator names with a compatibility bridge for
their common aliases, the matrix-literal format shared by configs and
outputs, and the generator specification grammar:

    {"kind": "quadratic" | "renyi_hom" | "renyi_pure" | "smooth_f2" | "composite",
     "alpha": number?,
     "g": {"form": "half_square" | "power", "exponent": number}?,
     "parts": [{"generator": {...}, "weight": number, "subsystem": "first" | "second" | null}]?}

Matrix literals are row-major nested lists whose entries are real numbers
or [re, im] pairs. Three shorthands are accepted as well:

    {"diag": [..]}                 diagonal matrix
    {"pauli": "ZZ", "coeff": c}    c * (tensor product of Pauli factors)
    {"sum": [literal, ...]}        sum of literals
"""

from __future__ import annotations

from copy import deepcopy
from functools import reduce
from typing import Any, Dict, List, Optional

import numpy as np

from core.errors import DomainError, SchemaError
from core.generators import (
    Composite,
    CompositePart,
    EntropyGenerator,
    Quadratic,
    RenyiHomogeneous,
    RenyiPure,
    ScalarProfile,
    SmoothF2,
)
from core.matrixcore import PAULI, BipartiteShape

# Canonical generator kinds.
CANONICAL_GENERATOR_KINDS = {
    "quadratic",
    "renyi_hom",
    "renyi_pure",
    "smooth_f2",
    "composite",
}

# Alias -> canonical bridge.
GENERATOR_ALIASES = {
    "s2": "quadratic",
    "S2": "quadratic",
    "renyi_homogeneous": "renyi_hom",
    "renyi_pure_state": "renyi_pure",
    "f2": "smooth_f2",
}

PROFILE_FORMS = {"half_square", "power"}

# Defaults filled into every config (never overwriting given keys).
CONFIG_DEFAULTS: Dict[str, Any] = {
    "record_every": 1,
    "tolerance": 1e-6,
    "normalize": True,
    "outputs": [],
}


def normalize_generator_kind(kind: Any) -> Any:
    """Return the canonical kind when an alias is provided.

    Non-string kinds pass through unchanged; the config gate rejects them.
    """
    if not isinstance(kind, str):
        return kind
    return GENERATOR_ALIASES.get(kind, kind)


# ──────────────────────────────────────────────────
# Matrix literals
# ──────────────────────────────────────────────────

def parse_complex(entry: Any, field: str) -> complex:
    if isinstance(entry, bool):
        raise SchemaError(field, "booleans are not matrix entries")
    if isinstance(entry, (int, float)):
        return complex(float(entry), 0.0)
    if isinstance(entry, (list, tuple)) and len(entry) == 2 and all(
        isinstance(x, (int, float)) and not isinstance(x, bool) for x in entry
    ):
        return complex(float(entry[0]), float(entry[1]))
    raise SchemaError(field, f"expected a number or an [re, im] pair, got {entry!r}")


def _real(value: Any, field: str) -> float:
    if isinstance(value, bool):
        raise SchemaError(field, f"expected a real number, got {value!r}")
    try:
        return float(value)
    except (TypeError, ValueError):
        raise SchemaError(field, f"expected a real number, got {value!r}") from None


def _pauli_string(word: str, field: str) -> np.ndarray:
    if not word or any(ch not in PAULI for ch in word.upper()):
        raise SchemaError(field, f"pauli word must use the letters I, X, Y, Z; got {word!r}")
    return reduce(np.kron, [PAULI[ch] for ch in word.upper()])


def parse_matrix_literal(literal: Any, field: str = "matrix") -> np.ndarray:
    """Complex square ndarray from a matrix literal (Hermiticity is checked later)."""
    if isinstance(literal, dict):
        if "diag" in literal:
            values = [parse_complex(x, f"{field}.diag[{i}]") for i, x in enumerate(literal["diag"])]
            return np.diag(np.array(values, dtype=complex))
        if "pauli" in literal:
            coeff = _real(literal.get("coeff", 1.0), f"{field}.coeff")
            return coeff * _pauli_string(str(literal["pauli"]), f"{field}.pauli")
        if "sum" in literal:
            terms = [
                parse_matrix_literal(term, f"{field}.sum[{i}]")
                for i, term in enumerate(literal["sum"])
            ]
            if not terms:
                raise SchemaError(f"{field}.sum", "empty sum")
            dims = {t.shape for t in terms}
            if len(dims) != 1:
                raise SchemaError(f"{field}.sum", f"terms have different shapes {sorted(dims)}")
            return sum(terms[1:], terms[0])
        raise SchemaError(field, f"unknown matrix shorthand keys {sorted(literal)}")

    if not isinstance(literal, list) or not literal:
        raise SchemaError(field, "expected a non-empty list of rows")
    n = len(literal)
    out = np.zeros((n, n), dtype=complex)
    for i, row in enumerate(literal):
        if not isinstance(row, list) or len(row) != n:
            raise SchemaError(f"{field}[{i}]", f"expected a row of length {n}")
        for j, entry in enumerate(row):
            out[i, j] = parse_complex(entry, f"{field}[{i}][{j}]")
    return out


def to_matrix_literal(m: Any) -> List[List[List[float]]]:
    """Nested [re, im] pairs, row-major."""
    arr = np.asarray(getattr(m, "data", m), dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in arr]


def parse_shape(raw: Any, field: str = "shape") -> Optional[BipartiteShape]:
    if raw is None:
        return None
    if isinstance(raw, dict):
        raw = [raw.get("d1"), raw.get("d2")]
    if not isinstance(raw, (list, tuple)) or len(raw) != 2:
        raise SchemaError(field, f"expected [d1, d2], got {raw!r}")
    try:
        return BipartiteShape(int(raw[0]), int(raw[1]))
    except (TypeError, ValueError, DomainError) as exc:
        raise SchemaError(field, str(exc)) from exc


# ──────────────────────────────────────────────────
# Generator grammar
# ──────────────────────────────────────────────────

def _profile_from_dict(raw: Any, field: str) -> ScalarProfile:
    if raw is None:
        return ScalarProfile.half_square()
    if not isinstance(raw, dict):
        raise SchemaError(field, f"expected an object, got {raw!r}")
    form = raw.get("form", "half_square")
    if form not in PROFILE_FORMS:
        raise SchemaError(f"{field}.form", f"unknown profile {form!r}; expected one of {sorted(PROFILE_FORMS)}")
    if form == "half_square":
        return ScalarProfile.half_square()
    if "exponent" not in raw:
        raise SchemaError(f"{field}.exponent", "power profile needs an exponent")
    try:
        return ScalarProfile.power(float(raw["exponent"]))
    except (TypeError, ValueError, DomainError) as exc:
        raise SchemaError(f"{field}.exponent", str(exc)) from exc


def spec_from_dict(
    raw: Dict[str, Any],
    shape: Optional[BipartiteShape] = None,
    field: str = "generator",
) -> EntropyGenerator:
    """Build an EntropyGenerator from the config grammar."""
    if not isinstance(raw, dict) or "kind" not in raw:
        raise SchemaError(field, "generator spec must be an object with a 'kind'")
    if not isinstance(raw["kind"], str):
        raise SchemaError(f"{field}.kind", f"must be a string, got {type(raw['kind']).__name__}")
    kind = normalize_generator_kind(raw["kind"])
    if kind not in CANONICAL_GENERATOR_KINDS:
        raise SchemaError(f"{field}.kind", f"unknown generator kind {raw['kind']!r}")

    try:
        if kind == "quadratic":
            return Quadratic()
        if kind in ("renyi_hom", "renyi_pure"):
            if "alpha" not in raw:
                raise SchemaError(f"{field}.alpha", f"{kind} needs an alpha")
            cls = RenyiHomogeneous if kind == "renyi_hom" else RenyiPure
            return cls(float(raw["alpha"]))
        if kind == "smooth_f2":
            return SmoothF2(_profile_from_dict(raw.get("g"), f"{field}.g"))
        return _composite_from_dict(raw, shape, field)
    except SchemaError:
        raise
    except (TypeError, ValueError) as exc:
        raise SchemaError(field, str(exc)) from exc


def _composite_from_dict(raw: Dict[str, Any], shape: Optional[BipartiteShape], field: str) -> Composite:
    parts_raw = raw.get("parts")
    if not isinstance(parts_raw, list) or not parts_raw:
        raise SchemaError(f"{field}.parts", "composite needs a non-empty list of parts")
    parts = []
    for i, part in enumerate(parts_raw):
        pfield = f"{field}.parts[{i}]"
        if not isinstance(part, dict) or "generator" not in part or "weight" not in part:
            raise SchemaError(pfield, "each part needs 'generator' and 'weight'")
        inner = spec_from_dict(part["generator"], shape, f"{pfield}.generator")
        subsystem = part.get("subsystem")
        if subsystem is not None and shape is None:
            raise SchemaError(f"{pfield}.subsystem", "subsystem parts need a top-level 'shape'")
        try:
            parts.append(CompositePart(
                inner,
                float(part["weight"]),
                shape if subsystem is not None else None,
                subsystem,
            ))
        except DomainError as exc:
            raise SchemaError(pfield, str(exc)) from exc
    try:
        return Composite(tuple(parts))
    except DomainError as exc:
        raise SchemaError(f"{field}.parts", str(exc)) from exc


def spec_to_dict(s: EntropyGenerator) -> Dict[str, Any]:
    """Inverse of spec_from_dict (custom SmoothF2 profiles cannot be serialized)."""
    if isinstance(s, Quadratic):
        return {"kind": "quadratic"}
    if isinstance(s, (RenyiHomogeneous, RenyiPure)):
        return {"kind": s.kind, "alpha": s.alpha}
    if isinstance(s, SmoothF2):
        if s.profile.form == "half_square":
            return {"kind": "smooth_f2", "g": {"form": "half_square"}}
        if s.profile.form == "power":
            return {"kind": "smooth_f2", "g": {"form": "power", "exponent": s.profile.exponent}}
        raise DomainError("custom smooth_f2 profiles have no config representation")
    if isinstance(s, Composite):
        return {
            "kind": "composite",
            "parts": [
                {"generator": spec_to_dict(p.generator), "weight": p.weight, "subsystem": p.subsystem}
                for p in s.parts
            ],
        }
    raise DomainError(f"unknown generator {s!r}")


# ──────────────────────────────────────────────────
# Config normalization
# ──────────────────────────────────────────────────

def normalize_config(raw: Dict[str, Any]) -> Dict[str, Any]:
    """Copy a raw config, fill defaults and canonicalize generator kinds (recursively)."""
    config = deepcopy(raw)
    for key, default in CONFIG_DEFAULTS.items():
        config.setdefault(key, deepcopy(default))
    gen = config.get("generator")
    if isinstance(gen, dict):
        _canonicalize_kinds(gen)
    return config


def _canonicalize_kinds(gen: Dict[str, Any]) -> None:
    if "kind" in gen:
        gen["kind"] = normalize_generator_kind(gen["kind"])
    for part in gen.get("parts") or []:
        if isinstance(part, dict) and isinstance(part.get("generator"), dict):
            _canonicalize_kinds(part["generator"])
