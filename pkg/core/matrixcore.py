"""Dense Hermitian matrix substrate for the Nambu dynamics toolkit.

Provides the validated value types (HermitianMatrix, DensityMatrix,
BipartiteShape), spectral helpers (real matrix powers, moments f_k), the
bipartite plumbing (tensor product, partial trace, operator lifting) and a
central-difference gradient for arbitrary scalar functionals.

Index convention for composite systems: basis index = i1 * d2 + i2
(subsystem 1 outer), which is exactly numpy's np.kron ordering.

Public functions accept either the validated types or raw complex ndarrays.
The integrator passes raw arrays through the hot path and only wraps
recorded states.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Optional, Union

import numpy as np
from scipy import linalg

from core.errors import (
    DimensionMismatchError,
    DomainError,
    EvaluationError,
    SingularPowerError,
)
from core.rng import SeededStream

# ──────────────────────────────────────────────────
# Tolerances
# ──────────────────────────────────────────────────

# Max |M - M^dagger| (relative to max(1, max|M|)) absorbed by symmetrization.
HERMITIAN_TOL = 1e-12

# Most negative eigenvalue accepted in a DensityMatrix.
PSD_TOL = 1e-10

# Eigenvalues below this are treated as exact zeros by real powers.
CLAMP_TOL = 1e-12

FD_STEP = 1e-5

KEEP_FIRST = "first"
KEEP_SECOND = "second"
KEEP_CHOICES = (KEEP_FIRST, KEEP_SECOND)

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


# ──────────────────────────────────────────────────
# Value types
# ──────────────────────────────────────────────────

class HermitianMatrix:
    """Immutable dim x dim complex Hermitian matrix."""

    def __init__(self, entries: Any, *, tol: float = HERMITIAN_TOL):
        arr = np.array(entries, dtype=complex)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
            raise DomainError(f"expected a non-empty square matrix, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise DomainError("matrix has non-finite entries")
        asym = float(np.max(np.abs(arr - arr.conj().T)))
        scale = max(1.0, float(np.max(np.abs(arr))))
        if asym > tol * scale:
            raise DomainError(f"matrix is not Hermitian (asymmetry {asym:.3e})")
        arr = (arr + arr.conj().T) / 2.0
        arr.setflags(write=False)
        self._data = arr

    @property
    def data(self) -> np.ndarray:
        return self._data

    @property
    def dim(self) -> int:
        return int(self._data.shape[0])

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self._data.copy()
        return self._data.astype(dtype)

    def __repr__(self) -> str:
        return f"{type(self).__name__}(dim={self.dim})"

    def __add__(self, other: "HermitianMatrix") -> "HermitianMatrix":
        return HermitianMatrix(self._data + as_array(other))

    def __sub__(self, other: "HermitianMatrix") -> "HermitianMatrix":
        return HermitianMatrix(self._data - as_array(other))

    def scaled(self, factor: float) -> "HermitianMatrix":
        return HermitianMatrix(self._data * float(factor))

    def trace(self) -> float:
        return float(np.trace(self._data).real)

    def allclose(self, other: Any, atol: float = 1e-10) -> bool:
        return bool(np.allclose(self._data, as_array(other), atol=atol, rtol=0.0))

    @classmethod
    def identity(cls, dim: int) -> "HermitianMatrix":
        return cls(np.eye(dim, dtype=complex))

    @classmethod
    def diagonal(cls, values: Any) -> "HermitianMatrix":
        return cls(np.diag(np.asarray(values, dtype=float)))


class DensityMatrix(HermitianMatrix):
    """Positive semidefinite Hermitian matrix with positive trace.

    Not necessarily normalized; `normalized()` divides by the trace.
    """

    def __init__(self, entries: Any, *, psd_tol: float = PSD_TOL, tol: float = HERMITIAN_TOL):
        super().__init__(entries, tol=tol)
        evals = np.linalg.eigvalsh(self._data)
        if evals[0] < -psd_tol:
            raise DomainError(f"state is not positive semidefinite (eigenvalue {evals[0]:.3e})")
        self._init_spectrum(evals)

    def _init_spectrum(self, evals: np.ndarray) -> None:
        tr = float(np.trace(self._data).real)
        if tr <= 0.0:
            raise DomainError(f"state has non-positive trace {tr:.3e}")
        evals = np.array(evals, dtype=float)
        evals.setflags(write=False)
        self._eigenvalues = evals
        self._trace = tr

    @classmethod
    def trusted(cls, arr: np.ndarray, eigenvalues: np.ndarray) -> "DensityMatrix":
        """Wrap an already-Hermitian array whose spectrum was just computed."""
        obj = cls.__new__(cls)
        data = np.array(arr, dtype=complex)
        data.setflags(write=False)
        obj._data = data
        obj._init_spectrum(eigenvalues)
        return obj

    @property
    def eigenvalues(self) -> np.ndarray:
        """Ascending eigenvalues."""
        return self._eigenvalues

    def trace(self) -> float:
        return self._trace

    @property
    def rank(self) -> int:
        return int(np.count_nonzero(self._eigenvalues > CLAMP_TOL))

    def normalized(self) -> "DensityMatrix":
        return DensityMatrix(self._data / self._trace)

    def scaled(self, factor: float) -> "DensityMatrix":
        if factor <= 0.0:
            raise DomainError(f"density matrices only scale by positive factors, got {factor}")
        return DensityMatrix(self._data * float(factor))

    def is_pure(self, tol: float = PSD_TOL) -> bool:
        purity = float(np.vdot(self._data, self._data).real)
        return abs(purity - self._trace ** 2) <= tol * max(1.0, self._trace ** 2)


@dataclass(frozen=True)
class SpectralDecomposition:
    """M = V diag(eigenvalues) V^dagger with ascending eigenvalues."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T

    def apply(self, fn: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
        """V diag(fn(eigenvalues)) V^dagger."""
        v = self.eigenvectors
        return (v * fn(self.eigenvalues)) @ v.conj().T


@dataclass(frozen=True)
class BipartiteShape:
    """Subsystem dimensions of a composite system; total dim = d1 * d2."""

    d1: int
    d2: int

    def __post_init__(self) -> None:
        if int(self.d1) < 1 or int(self.d2) < 1:
            raise DomainError(f"subsystem dimensions must be >= 1, got ({self.d1}, {self.d2})")

    @property
    def dim(self) -> int:
        return self.d1 * self.d2

    def kept_dim(self, keep: str) -> int:
        _check_keep(keep)
        return self.d1 if keep == KEEP_FIRST else self.d2

    def check(self, dim: int, what: str = "state") -> None:
        if dim != self.dim:
            raise DimensionMismatchError(f"{what} vs {self.d1}x{self.d2} shape", self.dim, dim)


MatrixLike = Union[HermitianMatrix, np.ndarray]


def as_array(m: Any) -> np.ndarray:
    """Complex ndarray view of a HermitianMatrix, DensityMatrix or array-like."""
    if isinstance(m, HermitianMatrix):
        return m.data
    return np.asarray(m, dtype=complex)


def _check_keep(keep: str) -> None:
    if keep not in KEEP_CHOICES:
        raise DomainError(f"keep must be one of {KEEP_CHOICES}, got {keep!r}")


# ──────────────────────────────────────────────────
# Spectral operations
# ──────────────────────────────────────────────────

def spectral_decompose(m: MatrixLike) -> SpectralDecomposition:
    """Eigen-decomposition of a Hermitian matrix (ascending eigenvalues)."""
    herm = m if isinstance(m, HermitianMatrix) else HermitianMatrix(m)
    evals, evecs = linalg.eigh(herm.data)
    return SpectralDecomposition(np.asarray(evals, dtype=float), evecs)


def support_spectrum(arr: np.ndarray, support_rank: Optional[int] = None):
    """eigh of a state array with the kernel zeroed.

    Without `support_rank`, eigenvalues below CLAMP_TOL become exact zeros.
    With it, only the `support_rank` largest eigenvalues survive; this keeps
    Runge-Kutta stage states on the support of the initial state.
    """
    evals, evecs = np.linalg.eigh(arr)
    evals = np.where(evals < CLAMP_TOL, 0.0, evals)
    if support_rank is not None and support_rank < evals.size:
        evals[: evals.size - support_rank] = 0.0
    return evals, evecs


def power_array(arr: np.ndarray, s: float, support_rank: Optional[int] = None) -> np.ndarray:
    """arr^s on the support of arr (0^s := 0 for s > 0)."""
    if s == 1.0:
        return np.array(arr, dtype=complex)
    evals, evecs = support_spectrum(arr, support_rank)
    if s > 0.0:
        powered = np.zeros_like(evals)
        positive = evals > 0.0
        powered[positive] = evals[positive] ** s
    else:
        smallest = float(evals.min())
        if smallest <= CLAMP_TOL:
            raise SingularPowerError(s, smallest)
        powered = evals ** s
    return (evecs * powered) @ evecs.conj().T


def matrix_power(rho: MatrixLike, s: float, *, support_rank: Optional[int] = None) -> HermitianMatrix:
    """Real power rho^s via the spectral decomposition.

    Eigenvalues in [-1e-10, 0) are clamped to 0 first. For s <= 0 the state
    must be full rank.
    """
    return HermitianMatrix(power_array(as_array(rho), float(s), support_rank))


def moment(rho: MatrixLike, k: int) -> float:
    """f_k = Tr(rho^k), from the eigenvalues."""
    if int(k) != k or k < 1:
        raise DomainError(f"moment order must be a positive integer, got {k!r}")
    evals = _eigenvalues(rho)
    return float(np.sum(evals ** int(k)))


def moments(rho: MatrixLike, kmax: int = 5) -> np.ndarray:
    """[f_1, ..., f_kmax] from one eigenvalue computation."""
    evals = _eigenvalues(rho)
    return np.array([float(np.sum(evals ** k)) for k in range(1, kmax + 1)])


def _eigenvalues(rho: MatrixLike) -> np.ndarray:
    if isinstance(rho, DensityMatrix):
        return rho.eigenvalues
    return np.linalg.eigvalsh(as_array(rho))


def trace_distance(a: MatrixLike, b: MatrixLike) -> float:
    """Half the trace norm of a - b."""
    diff = as_array(a) - as_array(b)
    diff = (diff + diff.conj().T) / 2.0
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(diff))))


def commutator(a: MatrixLike, b: MatrixLike) -> np.ndarray:
    x, y = as_array(a), as_array(b)
    return x @ y - y @ x


# ──────────────────────────────────────────────────
# Composite systems
# ──────────────────────────────────────────────────

def tensor_product(a: MatrixLike, b: MatrixLike) -> HermitianMatrix:
    """Kronecker product (subsystem 1 outer). DensityMatrix in, DensityMatrix out."""
    product = np.kron(as_array(a), as_array(b))
    if isinstance(a, DensityMatrix) and isinstance(b, DensityMatrix):
        return DensityMatrix(product)
    return HermitianMatrix(product)


def partial_trace_array(arr: np.ndarray, shape: BipartiteShape, keep: str) -> np.ndarray:
    _check_keep(keep)
    shape.check(arr.shape[0])
    blocks = arr.reshape(shape.d1, shape.d2, shape.d1, shape.d2)
    if keep == KEEP_FIRST:
        return np.trace(blocks, axis1=1, axis2=3)
    return np.trace(blocks, axis1=0, axis2=2)


def partial_trace(rho: MatrixLike, shape: BipartiteShape, keep: str) -> HermitianMatrix:
    """Reduced state of subsystem `keep` ("first" or "second")."""
    reduced = partial_trace_array(as_array(rho), shape, keep)
    if isinstance(rho, DensityMatrix):
        return DensityMatrix(reduced)
    return HermitianMatrix(reduced)


def lift_array(op: np.ndarray, shape: BipartiteShape, keep: str) -> np.ndarray:
    """op (x) I for keep="first", I (x) op for keep="second"."""
    _check_keep(keep)
    expected = shape.kept_dim(keep)
    if op.shape[0] != expected:
        raise DimensionMismatchError(f"operator on {keep} subsystem", expected, op.shape[0])
    if keep == KEEP_FIRST:
        return np.kron(op, np.eye(shape.d2))
    return np.kron(np.eye(shape.d1), op)


def lift_operator(op: MatrixLike, shape: BipartiteShape, keep: str) -> HermitianMatrix:
    """Embed a subsystem operator into the composite space."""
    return HermitianMatrix(lift_array(as_array(op), shape, keep))


# ──────────────────────────────────────────────────
# Finite differences
# ──────────────────────────────────────────────────

def gradient_fd_array(f: Callable[[np.ndarray], float], arr: np.ndarray, step: float = FD_STEP) -> np.ndarray:
    if step <= 0.0:
        raise DomainError(f"finite-difference step must be > 0, got {step}")
    dim = arr.shape[0]

    def derivative(direction: np.ndarray) -> float:
        up = f(arr + step * direction)
        down = f(arr - step * direction)
        if not (np.isfinite(up) and np.isfinite(down)):
            raise EvaluationError(f"functional returned non-finite value near the probe state ({up}, {down})")
        return (float(up) - float(down)) / (2.0 * step)

    grad = np.zeros((dim, dim), dtype=complex)
    for j in range(dim):
        unit = np.zeros((dim, dim), dtype=complex)
        unit[j, j] = 1.0
        grad[j, j] = derivative(unit)
        for k in range(j + 1, dim):
            sym = np.zeros((dim, dim), dtype=complex)
            sym[j, k] = sym[k, j] = 1.0
            anti = np.zeros((dim, dim), dtype=complex)
            anti[j, k] = 1j
            anti[k, j] = -1j
            value = 0.5 * (derivative(sym) + 1j * derivative(anti))
            grad[j, k] = value
            grad[k, j] = np.conj(value)
    return grad


def functional_gradient_fd(
    f: Callable[[np.ndarray], float], rho: MatrixLike, step: float = FD_STEP
) -> HermitianMatrix:
    """Operator gradient G with f(rho + eps D) - f(rho) ~ eps Tr(D G).

    `f` receives Hermitian ndarrays (perturbed states need not be positive).
    Central differences run along the d^2 real Hermitian directions.
    """
    return HermitianMatrix(gradient_fd_array(f, as_array(rho), step))


# ──────────────────────────────────────────────────
# Constructors
# ──────────────────────────────────────────────────

def pure_state(psi: Any) -> DensityMatrix:
    """|psi><psi| (not renormalized)."""
    vec = np.asarray(psi, dtype=complex).reshape(-1)
    if not np.any(vec):
        raise DomainError("state vector is zero")
    return DensityMatrix(np.outer(vec, vec.conj()))


def maximally_mixed(dim: int) -> DensityMatrix:
    if dim < 1:
        raise DomainError(f"dimension must be >= 1, got {dim}")
    return DensityMatrix(np.eye(dim, dtype=complex) / dim)


def random_unitary(dim: int, stream: SeededStream) -> np.ndarray:
    """Haar unitary from the QR factorization of a Ginibre matrix."""
    z = stream.complex_normal((dim, dim)) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    phases = np.diag(r) / np.abs(np.diag(r))
    return q * phases


def random_hermitian(dim: int, stream: SeededStream, norm: Optional[float] = None) -> HermitianMatrix:
    """GUE-like Hermitian matrix, optionally rescaled to a given spectral norm."""
    z = stream.complex_normal((dim, dim))
    h = (z + z.conj().T) / 2.0
    if norm is not None:
        current = float(np.max(np.abs(np.linalg.eigvalsh(h))))
        h = h * (norm / current)
    return HermitianMatrix(h)


def random_density(
    dim: int,
    rank: int,
    seed: Union[int, SeededStream],
    *,
    min_eigenvalue: float = 1e-6,
) -> DensityMatrix:
    """Unit-trace state with exactly `rank` nonzero eigenvalues, each >= min_eigenvalue."""
    if dim < 1:
        raise DomainError(f"dimension must be >= 1, got {dim}")
    if not 1 <= rank <= dim:
        raise DomainError(f"rank must lie in [1, {dim}], got {rank}")
    if rank * min_eigenvalue >= 1.0:
        raise DomainError(f"min_eigenvalue {min_eigenvalue} too large for rank {rank}")
    stream = seed if isinstance(seed, SeededStream) else SeededStream(seed)
    u = random_unitary(dim, stream)
    weights = min_eigenvalue + (1.0 - rank * min_eigenvalue) * stream.simplex(rank)
    cols = u[:, :rank]
    rho = (cols * weights) @ cols.conj().T
    return DensityMatrix((rho + rho.conj().T) / 2.0)
