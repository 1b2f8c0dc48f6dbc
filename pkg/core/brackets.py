"""Triple brackets over scalar functionals of a density matrix.

    [F, G, H](rho) = -i Tr([dF, dG] dH)

where dF is the operator gradient of F at rho. The bilinear bracket used by
ordinary quantum mechanics is the triple bracket with H = S2, whose
gradient is rho itself. Nested brackets (the Jacobi defect) differentiate
the inner bracket by central differences.
"""

from __future__ import annotations

from typing import Any, Callable, Optional, Union

import numpy as np

from core.errors import ConsistencyError, DimensionMismatchError, DomainError
from core.generators import (
    Composite,
    EntropyGenerator,
    Quadratic,
    RenyiHomogeneous,
    RenyiPure,
    SmoothF2,
    describe,
    gradient_array,
    uses_subsystems,
    value_array,
)
from core.matrixcore import (
    FD_STEP,
    BipartiteShape,
    MatrixLike,
    as_array,
    gradient_fd_array,
    lift_array,
    partial_trace_array,
)

# A closed-form gradient must agree with finite differences this well on the probe state.
CLOSED_FORM_TOL = 1e-6

# Imaginary part of a bracket above this (relative to max(1, |real|)) is a bug.
IMAGINARY_GUARD = 1e-8

_GENERATOR_TYPES = (Quadratic, RenyiHomogeneous, RenyiPure, SmoothF2, Composite)


def probe_state(dim: int) -> np.ndarray:
    """Fixed full-rank state: weights proportional to 1..d in the Fourier basis."""
    weights = np.arange(1, dim + 1, dtype=float)
    weights /= weights.sum()
    idx = np.arange(dim)
    fourier = np.exp(2j * np.pi * np.outer(idx, idx) / dim) / np.sqrt(dim)
    return (fourier * weights) @ fourier.conj().T


class Functional:
    """Scalar functional of a dim x dim state with an operator gradient.

    The evaluator receives Hermitian ndarrays. Without a closed-form gradient
    the gradient is computed by central differences.
    """

    def __init__(
        self,
        evaluator: Callable[[np.ndarray], float],
        dim: int,
        gradient: Optional[Callable[[np.ndarray], np.ndarray]] = None,
        *,
        label: str = "functional",
        step: float = FD_STEP,
        validate: bool = True,
    ):
        if dim < 1:
            raise DomainError(f"functional dimension must be >= 1, got {dim}")
        self.evaluator = evaluator
        self.dim = int(dim)
        self.label = label
        self.step = step
        self._gradient = gradient
        if gradient is not None and validate:
            self._validate_closed_form()

    def __repr__(self) -> str:
        return f"Functional({self.label!r}, dim={self.dim}, {self.gradient_mode})"

    @property
    def gradient_mode(self) -> str:
        return "finite_difference" if self._gradient is None else "closed_form"

    def _validate_closed_form(self) -> None:
        probe = probe_state(self.dim)
        closed = np.asarray(self._gradient(probe), dtype=complex)
        numeric = gradient_fd_array(self.evaluator, probe, self.step)
        err = float(np.linalg.norm(closed - numeric))
        scale = max(1.0, float(np.linalg.norm(numeric)))
        if err > CLOSED_FORM_TOL * scale:
            raise DomainError(
                f"closed-form gradient of {self.label} disagrees with finite differences "
                f"(error {err:.3e})"
            )

    def _check_dim(self, arr: np.ndarray) -> None:
        if arr.shape[0] != self.dim:
            raise DimensionMismatchError(f"state for {self.label}", self.dim, arr.shape[0])

    def __call__(self, rho: MatrixLike) -> float:
        arr = as_array(rho)
        self._check_dim(arr)
        return float(self.evaluator(arr))

    def grad(self, rho: MatrixLike) -> np.ndarray:
        arr = as_array(rho)
        self._check_dim(arr)
        if self._gradient is not None:
            return np.asarray(self._gradient(arr), dtype=complex)
        return gradient_fd_array(self.evaluator, arr, self.step)

    # ── constructors ────────────────────────────────

    @classmethod
    def linear(cls, op: MatrixLike, label: Optional[str] = None) -> "Functional":
        """F[rho] = Tr(rho A), gradient A."""
        a = np.array(as_array(op), dtype=complex)
        return cls(
            lambda arr: float(np.sum(arr * a.T).real),
            a.shape[0],
            lambda arr: a,
            label=label or "linear",
            validate=False,
        )

    @classmethod
    def trace(cls, dim: int) -> "Functional":
        return cls.linear(np.eye(dim, dtype=complex), label="trace")

    @classmethod
    def moment(cls, m: int, dim: int) -> "Functional":
        """f_m[rho] = Tr(rho^m), gradient m rho^(m-1)."""
        if int(m) != m or m < 1:
            raise DomainError(f"moment order must be a positive integer, got {m!r}")
        m = int(m)
        return cls(
            lambda arr: float(np.trace(np.linalg.matrix_power(arr, m)).real),
            dim,
            lambda arr: m * np.linalg.matrix_power(arr, m - 1),
            label=f"f{m}",
            validate=False,
        )

    @classmethod
    def from_generator(cls, s: EntropyGenerator, dim: int) -> "Functional":
        return cls(
            lambda arr: value_array(s, arr),
            dim,
            lambda arr: gradient_array(s, arr),
            label=describe(s),
            validate=False,
        )

    @classmethod
    def on_subsystem(cls, f: "Functional", shape: BipartiteShape, keep: str) -> "Functional":
        """F[rho] = f[Tr_other rho] on the composite space."""
        expected = shape.kept_dim(keep)
        if f.dim != expected:
            raise DimensionMismatchError(f"{f.label} on {keep} subsystem", expected, f.dim)

        def evaluator(arr: np.ndarray) -> float:
            return f.evaluator(partial_trace_array(arr, shape, keep))

        def grad(arr: np.ndarray) -> np.ndarray:
            return lift_array(f.grad(partial_trace_array(arr, shape, keep)), shape, keep)

        return cls(evaluator, shape.dim, grad, label=f"{f.label}@{keep}", step=f.step, validate=False)


FunctionalLike = Union[Functional, EntropyGenerator]


def _as_functional(x: Any, dim: int) -> Functional:
    if isinstance(x, Functional):
        return x
    if isinstance(x, _GENERATOR_TYPES):
        return Functional.from_generator(x, dim)
    raise DomainError(f"expected a Functional or an entropy generator, got {type(x).__name__}")


def _real_part(value: complex) -> float:
    residue = abs(value.imag)
    if residue > IMAGINARY_GUARD * max(1.0, abs(value.real)):
        raise ConsistencyError(residue, IMAGINARY_GUARD)
    return float(value.real)


def bracket_of_gradients(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> float:
    """-i Tr([A, B] C) with the imaginary-residue guard."""
    comm = a @ b - b @ a
    return _real_part(-1j * np.trace(comm @ c))


# ──────────────────────────────────────────────────
# Brackets
# ──────────────────────────────────────────────────

def triple_bracket(f: FunctionalLike, g: FunctionalLike, h: FunctionalLike, rho: MatrixLike) -> float:
    """[F, G, H](rho); totally antisymmetric in its three functionals."""
    arr = as_array(rho)
    dim = arr.shape[0]
    return bracket_of_gradients(
        _as_functional(f, dim).grad(arr),
        _as_functional(g, dim).grad(arr),
        _as_functional(h, dim).grad(arr),
    )


def bbmj_bracket(f: FunctionalLike, g: FunctionalLike, rho: MatrixLike) -> float:
    """Bilinear bracket -i Tr(rho [dF, dG]): the triple bracket with S2 last."""
    return triple_bracket(f, g, Quadratic(), rho)


def poisson_bracket(f: FunctionalLike, g: FunctionalLike, s: EntropyGenerator, rho: MatrixLike) -> float:
    """{F, G}_S = [F, G, S]."""
    return triple_bracket(f, g, s, rho)


def observable_rate(obs: MatrixLike, hamiltonian: MatrixLike, s: EntropyGenerator, rho: MatrixLike) -> float:
    """d/dt Tr(rho F) along the flow generated by H and S: -i Tr([F, H] dS)."""
    arr = as_array(rho)
    return bracket_of_gradients(as_array(obs), as_array(hamiltonian), gradient_array(s, arr))


def jacobi_defect(
    f: FunctionalLike,
    g: FunctionalLike,
    h: FunctionalLike,
    s: EntropyGenerator,
    rho: MatrixLike,
    step: float = FD_STEP,
) -> float:
    """{{F,G}_S,H}_S + {{H,F}_S,G}_S + {{G,H}_S,F}_S.

    Inner brackets become finite-difference Functionals; the result carries
    that noise floor (about 1e-6 for O(1) operators at the default step).
    """
    arr = as_array(rho)
    dim = arr.shape[0]
    fs = [_as_functional(x, dim) for x in (f, g, h)]
    sf = _as_functional(s, dim)

    def inner(x: Functional, y: Functional) -> Functional:
        return Functional(
            lambda a: bracket_of_gradients(x.grad(a), y.grad(a), sf.grad(a)),
            dim,
            label=f"{{{x.label},{y.label}}}",
            step=step,
        )

    ff, gg, hh = fs
    return (
        triple_bracket(inner(ff, gg), hh, sf, arr)
        + triple_bracket(inner(hh, ff), gg, sf, arr)
        + triple_bracket(inner(gg, hh), ff, sf, arr)
    )


def local_bracket_check(
    shape: BipartiteShape,
    f_first: Functional,
    g_second: Functional,
    s: EntropyGenerator,
    rho: MatrixLike,
) -> float:
    """|{F, G}_S| for F depending only on the first reduced state, G on the second."""
    arr = as_array(rho)
    shape.check(arr.shape[0])
    lifted_f = Functional.on_subsystem(f_first, shape, "first")
    lifted_g = Functional.on_subsystem(g_second, shape, "second")
    return abs(triple_bracket(lifted_f, lifted_g, s, arr))


def moment_casimir_check(m: int, g: FunctionalLike, s: EntropyGenerator, rho: MatrixLike) -> float:
    """|[f_m, G, S]| for a generator built from moments of the full state."""
    if uses_subsystems(s):
        raise DomainError("moment Casimir check needs a generator built from full-state moments")
    arr = as_array(rho)
    return abs(triple_bracket(Functional.moment(m, arr.shape[0]), g, s, arr))
