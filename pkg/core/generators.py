"""Entropy generators S[rho] and their operator gradients.

Variants:
    Quadratic          S2 = 1/2 Tr(rho^2)
    RenyiHomogeneous   (1 - 1/alpha) Tr(rho^alpha)^u / (Tr rho)^(u - 1),  u = 1/(alpha - 1)
    RenyiPure          same with prefactor 1/2
    SmoothF2           g(f2), f2 = Tr(rho^2)
    Composite          Prod_k S_k^(p_k), parts optionally acting on a reduced state

Every variant is 2-homogeneous except SmoothF2 with a non-linear profile.
Gradients are true functional derivatives, identity terms included; those
terms drop out of every commutator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Tuple, Union

import numpy as np

from core.errors import DimensionMismatchError, DomainError, SingularPowerError
from core.matrixcore import (
    CLAMP_TOL,
    KEEP_CHOICES,
    BipartiteShape,
    HermitianMatrix,
    MatrixLike,
    as_array,
    lift_array,
    partial_trace_array,
    support_spectrum,
)

WEIGHT_SUM_TOL = 1e-12


# ──────────────────────────────────────────────────
# Variants
# ──────────────────────────────────────────────────

def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not math.isfinite(alpha) or alpha <= 0.0 or alpha == 1.0:
        raise DomainError(f"alpha must be a finite real > 0 and != 1, got {alpha!r}")
    return alpha


@dataclass(frozen=True)
class Quadratic:
    kind = "quadratic"


@dataclass(frozen=True)
class RenyiHomogeneous:
    alpha: float
    kind = "renyi_hom"

    def __post_init__(self) -> None:
        object.__setattr__(self, "alpha", _check_alpha(self.alpha))

    @property
    def prefactor(self) -> float:
        return 1.0 - 1.0 / self.alpha


@dataclass(frozen=True)
class RenyiPure:
    alpha: float
    kind = "renyi_pure"

    def __post_init__(self) -> None:
        object.__setattr__(self, "alpha", _check_alpha(self.alpha))

    @property
    def prefactor(self) -> float:
        return 0.5


@dataclass(frozen=True)
class ScalarProfile:
    """Smooth g(x) with derivatives, plus a tag for serialization."""

    g: Callable[[float], float] = field(compare=False)
    dg: Callable[[float], float] = field(compare=False)
    d2g: Callable[[float], float] = field(compare=False)
    form: str = "custom"
    exponent: Optional[float] = None

    @classmethod
    def half_square(cls) -> "ScalarProfile":
        return cls(
            g=lambda x: 0.5 * x * x,
            dg=lambda x: x,
            d2g=lambda x: 1.0,
            form="half_square",
        )

    @classmethod
    def power(cls, exponent: float) -> "ScalarProfile":
        """g(x) = x^e / 2; e = 1 reproduces S2, e = 2 equals half_square."""
        e = float(exponent)
        if not math.isfinite(e) or e <= 0.0:
            raise DomainError(f"power profile needs a positive exponent, got {exponent!r}")
        return cls(
            g=lambda x: 0.5 * x ** e,
            dg=lambda x: 0.5 * e * x ** (e - 1.0),
            d2g=lambda x: 0.5 * e * (e - 1.0) * x ** (e - 2.0),
            form="power",
            exponent=e,
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ScalarProfile):
            return NotImplemented
        if self.form == "custom" or other.form == "custom":
            return self is other
        return (self.form, self.exponent) == (other.form, other.exponent)

    def __hash__(self) -> int:
        return hash((self.form, self.exponent))


@dataclass(frozen=True)
class SmoothF2:
    profile: ScalarProfile
    kind = "smooth_f2"


@dataclass(frozen=True)
class CompositePart:
    """One factor S_k^(p_k); with `subsystem` set it acts on that reduced state."""

    generator: "LeafGenerator"
    weight: float
    shape: Optional[BipartiteShape] = None
    subsystem: Optional[str] = None

    def __post_init__(self) -> None:
        if isinstance(self.generator, Composite):
            raise DomainError("composite parts must not be composite; flatten the weights first")
        w = float(self.weight)
        if not math.isfinite(w) or w <= 0.0:
            raise DomainError(f"composite weights must be > 0, got {self.weight!r}")
        object.__setattr__(self, "weight", w)
        if (self.shape is None) != (self.subsystem is None):
            raise DomainError("a subsystem part needs both a bipartite shape and a subsystem selector")
        if self.subsystem is not None and self.subsystem not in KEEP_CHOICES:
            raise DomainError(f"subsystem must be one of {KEEP_CHOICES}, got {self.subsystem!r}")

    @property
    def on_subsystem(self) -> bool:
        return self.subsystem is not None

    def reduce(self, arr: np.ndarray) -> np.ndarray:
        if self.subsystem is None:
            return arr
        return partial_trace_array(arr, self.shape, self.subsystem)


@dataclass(frozen=True)
class Composite:
    parts: Tuple[CompositePart, ...]
    kind = "composite"

    def __post_init__(self) -> None:
        parts = tuple(self.parts)
        if not parts:
            raise DomainError("composite generator needs at least one part")
        total = sum(p.weight for p in parts)
        if abs(total - 1.0) > WEIGHT_SUM_TOL:
            raise DomainError(f"composite weights sum to {total:.15g}, expected 1")
        shapes = {p.shape for p in parts if p.shape is not None}
        if len(shapes) > 1:
            raise DomainError(f"subsystem parts disagree on the bipartite shape: {shapes}")
        object.__setattr__(self, "parts", parts)

    @property
    def shape(self) -> Optional[BipartiteShape]:
        for part in self.parts:
            if part.shape is not None:
                return part.shape
        return None


LeafGenerator = Union[Quadratic, RenyiHomogeneous, RenyiPure, SmoothF2]
EntropyGenerator = Union[Quadratic, RenyiHomogeneous, RenyiPure, SmoothF2, Composite]


def uses_subsystems(s: EntropyGenerator) -> bool:
    return isinstance(s, Composite) and any(p.on_subsystem for p in s.parts)


def describe(s: EntropyGenerator) -> str:
    """Short label such as 'renyi_hom(alpha=1.5)' for reports."""
    if isinstance(s, (RenyiHomogeneous, RenyiPure)):
        return f"{s.kind}(alpha={s.alpha:g})"
    if isinstance(s, SmoothF2):
        if s.profile.form == "power":
            return f"smooth_f2(power={s.profile.exponent:g})"
        return f"smooth_f2({s.profile.form})"
    if isinstance(s, Composite):
        inner = ", ".join(
            f"{p.weight:g}*{describe(p.generator)}" + (f"@{p.subsystem}" if p.subsystem else "")
            for p in s.parts
        )
        return f"composite[{inner}]"
    return "quadratic"


# ──────────────────────────────────────────────────
# Value and gradient
# ──────────────────────────────────────────────────

def _purity(arr: np.ndarray) -> float:
    return float(np.vdot(arr, arr).real)


def _renyi_terms(s: Union[RenyiHomogeneous, RenyiPure], arr: np.ndarray, support_rank: Optional[int]):
    """(T, r, rho^(alpha-1)) with T = Tr rho^alpha and r = Tr rho."""
    alpha = s.alpha
    r = float(np.trace(arr).real)
    if r <= 0.0:
        raise DomainError(f"state has non-positive trace {r:.3e}")
    if alpha == 2.0:
        return _purity(arr), r, arr
    evals, evecs = support_spectrum(arr, support_rank)
    if alpha < 1.0:
        smallest = float(evals.min())
        if smallest <= CLAMP_TOL:
            raise SingularPowerError(alpha - 1.0, smallest)
    positive = evals > 0.0
    t = float(np.sum(evals[positive] ** alpha))
    powered = np.zeros_like(evals)
    powered[positive] = evals[positive] ** (alpha - 1.0)
    return t, r, (evecs * powered) @ evecs.conj().T


def _leaf_value(s: LeafGenerator, arr: np.ndarray, support_rank: Optional[int]) -> float:
    if isinstance(s, Quadratic):
        return 0.5 * _purity(arr)
    if isinstance(s, SmoothF2):
        return float(s.profile.g(_purity(arr)))
    if isinstance(s, (RenyiHomogeneous, RenyiPure)):
        t, r, _ = _renyi_terms(s, arr, support_rank)
        u = 1.0 / (s.alpha - 1.0)
        return s.prefactor * t ** u * r ** (1.0 - u)
    raise DomainError(f"unknown generator {s!r}")


def _leaf_gradient(s: LeafGenerator, arr: np.ndarray, support_rank: Optional[int]) -> np.ndarray:
    if isinstance(s, Quadratic):
        return np.array(arr, dtype=complex)
    if isinstance(s, SmoothF2):
        return 2.0 * float(s.profile.dg(_purity(arr))) * arr
    if isinstance(s, (RenyiHomogeneous, RenyiPure)):
        alpha = s.alpha
        t, r, powered = _renyi_terms(s, arr, support_rank)
        u = 1.0 / (alpha - 1.0)
        coeff = alpha * u * t ** (u - 1.0) * r ** (1.0 - u)
        shift = (1.0 - u) * t ** u * r ** (-u)
        return s.prefactor * (coeff * powered + shift * np.eye(arr.shape[0]))
    raise DomainError(f"unknown generator {s!r}")


def _check_dims(s: EntropyGenerator, dim: int) -> None:
    shape = s.shape if isinstance(s, Composite) else None
    if shape is not None and shape.dim != dim:
        raise DimensionMismatchError("state vs composite generator shape", shape.dim, dim)


def _part_rank(part: CompositePart, support_rank: Optional[int]) -> Optional[int]:
    # Reduced spectra are not integrals of motion; only full-space parts track support.
    return None if part.on_subsystem else support_rank


def value_array(s: EntropyGenerator, arr: np.ndarray, support_rank: Optional[int] = None) -> float:
    if not isinstance(s, Composite):
        return _leaf_value(s, arr, support_rank)
    _check_dims(s, arr.shape[0])
    log_total = 0.0
    for part in s.parts:
        v = _leaf_value(part.generator, part.reduce(arr), _part_rank(part, support_rank))
        if v <= 0.0:
            raise DomainError(f"composite part {describe(part.generator)} has value {v:.3e} <= 0")
        log_total += part.weight * math.log(v)
    return math.exp(log_total)


def gradient_array(s: EntropyGenerator, arr: np.ndarray, support_rank: Optional[int] = None) -> np.ndarray:
    if not isinstance(s, Composite):
        return _leaf_gradient(s, arr, support_rank)
    _check_dims(s, arr.shape[0])
    values = []
    grads = []
    for part in s.parts:
        reduced = part.reduce(arr)
        rank = _part_rank(part, support_rank)
        v = _leaf_value(part.generator, reduced, rank)
        if v <= 0.0:
            raise DomainError(f"composite part {describe(part.generator)} has value {v:.3e} <= 0")
        g = _leaf_gradient(part.generator, reduced, rank)
        if part.on_subsystem:
            g = lift_array(g, part.shape, part.subsystem)
        values.append(v)
        grads.append(g)
    total = math.exp(sum(p.weight * math.log(v) for p, v in zip(s.parts, values)))
    out = np.zeros_like(arr, dtype=complex)
    for part, v, g in zip(s.parts, values, grads):
        out += (part.weight * total / v) * g
    return out


def value(s: EntropyGenerator, rho: MatrixLike, *, support_rank: Optional[int] = None) -> float:
    """S[rho]."""
    return value_array(s, as_array(rho), support_rank)


def gradient(s: EntropyGenerator, rho: MatrixLike, *, support_rank: Optional[int] = None) -> HermitianMatrix:
    """Operator gradient dS/drho."""
    return HermitianMatrix(gradient_array(s, as_array(rho), support_rank))


def check_homogeneity(s: EntropyGenerator, rho: MatrixLike, lam: float) -> float:
    """Relative defect |S(lam rho) - lam^2 S(rho)| / |lam^2 S(rho)|."""
    if lam <= 0.0:
        raise DomainError(f"scaling factor must be > 0, got {lam}")
    arr = as_array(rho)
    base = lam * lam * value_array(s, arr)
    scaled = value_array(s, lam * arr)
    return abs(scaled - base) / abs(base)


# ──────────────────────────────────────────────────
# Derived quantities
# ──────────────────────────────────────────────────

def speed_factor(s: EntropyGenerator) -> float:
    """Rate c with grad S = c rho + (multiple of I) on normalized pure states.

    Trajectories from pure normalized states follow exact_linear at time c*t.
    """
    if isinstance(s, (Quadratic, RenyiHomogeneous)):
        return 1.0
    if isinstance(s, RenyiPure):
        return s.alpha / (2.0 * (s.alpha - 1.0))
    if isinstance(s, SmoothF2):
        return 2.0 * float(s.profile.dg(1.0))
    if uses_subsystems(s):
        raise DomainError("speed factor is undefined for generators acting on subsystems")
    probe = np.zeros((2, 2), dtype=complex)
    probe[0, 0] = 1.0
    g = gradient_array(s, probe)
    return float((g[0, 0] - g[1, 1]).real)


def rate_coefficient(s: EntropyGenerator, rho: MatrixLike) -> float:
    """Scalar c in i drho/dt = c [H, rho^(alpha-1)] (alpha = 2 for Quadratic and SmoothF2)."""
    arr = as_array(rho)
    if isinstance(s, Quadratic):
        return 1.0
    if isinstance(s, SmoothF2):
        return 2.0 * float(s.profile.dg(_purity(arr)))
    if isinstance(s, (RenyiHomogeneous, RenyiPure)):
        t, r, _ = _renyi_terms(s, arr, None)
        u = 1.0 / (s.alpha - 1.0)
        return s.prefactor * s.alpha * u * t ** (u - 1.0) * r ** (1.0 - u)
    raise DomainError("composite generators have no single rate coefficient")


def flatten_composite(groups: Sequence[Tuple[float, Composite]]) -> Composite:
    """Merge weighted composites lam_i * (Prod_k S_ik^p_ik) into one level."""
    if not groups:
        raise DomainError("nothing to flatten")
    total = sum(float(lam) for lam, _ in groups)
    if abs(total - 1.0) > WEIGHT_SUM_TOL:
        raise DomainError(f"group weights sum to {total:.15g}, expected 1")
    parts = []
    for lam, comp in groups:
        if lam <= 0.0:
            raise DomainError(f"group weights must be > 0, got {lam}")
        for part in comp.parts:
            parts.append(CompositePart(part.generator, lam * part.weight, part.shape, part.subsystem))
    # Re-normalize away the roundoff of the products.
    s = sum(p.weight for p in parts)
    parts = [CompositePart(p.generator, p.weight / s, p.shape, p.subsystem) for p in parts]
    return Composite(tuple(parts))


def part_value(part: CompositePart, rho: MatrixLike) -> float:
    """S_k of one composite part, evaluated on its (reduced) state."""
    return _leaf_value(part.generator, part.reduce(as_array(rho)), None)
