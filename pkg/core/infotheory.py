"""Classical information measures: Hartley, Shannon, Renyi, Daroczy, gain/loss.

All measures take a `base` (the information unit a > 1; 2 gives bits, e
gives nats). Conventions used everywhere in this module:

    0 * log(1/0) := 0          zero probabilities carry no Shannon weight
    0 ** alpha   := 0          for alpha > 0; Renyi sums skip zero entries
    alpha < 0                  rejected (the measures stop being monotone)
    alpha == 1                 never evaluated numerically as a limit; the
                               Shannon / Kullback-Leibler forms are used

Usage (from Python):
    from core.infotheory import ProbDist, renyi, shannon
    p = ProbDist([0.75, 0.25])
    renyi(p, alpha=2.0)        # 0.678072 bits
    shannon(p, base=math.e)    # nats
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Sequence, Tuple, Union

import numpy as np
from scipy.special import entr, rel_entr

from core.errors import DomainError, PathologicalOrderWarning
from core.rng import SeededStream

# ──────────────────────────────────────────────────
# Constants
# ──────────────────────────────────────────────────

BITS = 2.0
NATS = math.e

SUM_TOLERANCE = 1e-12

# Orders above this make gain/loss ill-behaved (reported, not forbidden).
PATHOLOGICAL_ORDER = 2.0

# |gain| at or below this counts as vanishing in the uniqueness scan.
GAIN_VANISHING_TOL = 1e-12

# Inclusive range of distribution sizes drawn by the uniqueness scan.
SCAN_SIZES = (2, 8)

ArrayLike = Union[Sequence[float], np.ndarray]


# ──────────────────────────────────────────────────
# Domain types
# ──────────────────────────────────────────────────

def log_factor(base: float) -> float:
    """ln(base), validating that base is a legal information unit."""
    base = float(base)
    if not math.isfinite(base) or base <= 1.0:
        raise DomainError(f"log base must be a finite real > 1, got {base!r}")
    return math.log(base)


@dataclass(frozen=True)
class ProbDist:
    """Probability vector, stored exactly as given (never renormalized).

    With `incomplete=True` the entries may sum to less than 1 (an incomplete
    distribution); otherwise they must sum to 1 within 1e-12.
    """

    probs: np.ndarray
    incomplete: bool = False

    def __post_init__(self) -> None:
        arr = np.array(self.probs, dtype=float).reshape(-1)
        if arr.size == 0:
            raise DomainError("probability distribution must be non-empty")
        if not np.all(np.isfinite(arr)):
            raise DomainError("probabilities must be finite")
        if np.any(arr < 0.0):
            raise DomainError(f"negative probability {arr.min():g}")
        total = float(arr.sum())
        if self.incomplete:
            if total > 1.0 + SUM_TOLERANCE:
                raise DomainError(f"incomplete distribution sums to {total:.15g} > 1")
        elif abs(total - 1.0) > SUM_TOLERANCE:
            raise DomainError(f"probabilities sum to {total:.15g}, expected 1")
        arr.setflags(write=False)
        object.__setattr__(self, "probs", arr)

    def __len__(self) -> int:
        return int(self.probs.size)

    @classmethod
    def uniform(cls, n: int) -> "ProbDist":
        if n < 1:
            raise DomainError(f"uniform distribution needs n >= 1, got {n}")
        return cls(np.full(n, 1.0 / n))

    @classmethod
    def from_string(cls, text: str) -> "ProbDist":
        """Parse a comma-separated list such as '0.5,0.25,0.25'."""
        parts = [chunk.strip() for chunk in text.split(",") if chunk.strip()]
        try:
            values = [float(chunk) for chunk in parts]
        except ValueError as exc:
            raise DomainError(f"unparsable distribution {text!r}: {exc}") from exc
        return cls(values)

    @property
    def support(self) -> np.ndarray:
        return self.probs > 0.0


@dataclass(frozen=True)
class ConditionalUpdate:
    """A prior p_k and the posterior p_kl after observing some outcome B_l."""

    prior: ProbDist
    posterior: ProbDist

    def __post_init__(self) -> None:
        if len(self.prior) != len(self.posterior):
            raise DomainError(
                f"prior has {len(self.prior)} entries, posterior {len(self.posterior)}"
            )
        outside = self.posterior.support & ~self.prior.support
        if np.any(outside):
            idx = int(np.flatnonzero(outside)[0])
            raise DomainError(
                f"posterior support exceeds prior support at index {idx}; gain/loss undefined"
            )


def _check_order(alpha: float) -> float:
    alpha = float(alpha)
    if not math.isfinite(alpha) or alpha < 0.0:
        raise DomainError(f"order alpha must be a finite real >= 0, got {alpha!r}")
    return alpha


# ──────────────────────────────────────────────────
# Entropies
# ──────────────────────────────────────────────────

def hartley(n: int, base: float = BITS) -> float:
    """log_a(n): information gained by singling out one of n equally likely events."""
    if n < 1:
        raise DomainError(f"hartley needs n >= 1, got {n}")
    return math.log(n) / log_factor(base)


def information_content(p: float, base: float = BITS) -> float:
    """log_a(1/p) for a single event of probability p in (0, 1]."""
    if not 0.0 < p <= 1.0:
        raise DomainError(f"event probability must lie in (0, 1], got {p!r}")
    return -math.log(p) / log_factor(base)


def decrease_of_uncertainty(prior_k: float, posterior_k: float, base: float = BITS) -> float:
    """log_a(p_k / p_kl): uncertainty about A_k removed by learning B_l."""
    if prior_k <= 0.0 or posterior_k <= 0.0:
        raise DomainError("both probabilities must be positive")
    return math.log(prior_k / posterior_k) / log_factor(base)


def shannon(p: ProbDist, base: float = BITS) -> float:
    """Sum_k p_k log_a(1/p_k)."""
    return float(np.sum(entr(p.probs))) / log_factor(base)


def _power_sum(p: ProbDist, alpha: float) -> float:
    positive = p.probs[p.probs > 0.0]
    return float(np.sum(positive ** alpha))


def renyi(p: ProbDist, alpha: float, base: float = BITS) -> float:
    """Renyi alpha-entropy (1/(1-alpha)) log_a Sum_k p_k^alpha.

    alpha = 0 counts the support (zero entries are skipped).
    """
    alpha = _check_order(alpha)
    if alpha == 1.0:
        raise DomainError("renyi is undefined at alpha = 1; use shannon")
    return math.log(_power_sum(p, alpha)) / ((1.0 - alpha) * log_factor(base))


def renyi_star(p: ProbDist, alpha: float) -> float:
    """Base-free alpha*-entropy (Sum_k p_k^alpha)^(1/(1-alpha))."""
    alpha = _check_order(alpha)
    if alpha == 1.0:
        raise DomainError("renyi_star is undefined at alpha = 1; use exp(shannon)")
    return _power_sum(p, alpha) ** (1.0 / (1.0 - alpha))


def daroczy(p: ProbDist, alpha: float) -> float:
    """Daroczy entropy (2^(1-alpha) - 1)^-1 (Sum_k p_k^alpha - 1)."""
    alpha = float(alpha)
    if not math.isfinite(alpha) or alpha <= 0.0:
        raise DomainError(f"daroczy needs alpha > 0, got {alpha!r}")
    if alpha == 1.0:
        raise DomainError("daroczy is undefined at alpha = 1 (its limit is shannon in bits)")
    return (_power_sum(p, alpha) - 1.0) / (2.0 ** (1.0 - alpha) - 1.0)


def daroczy_limit_sweep(
    p: ProbDist, epsilons: Sequence[float] = (1e-2, 1e-3, 1e-4)
) -> List[Dict[str, float]]:
    """Evaluate daroczy at 1 - eps and 1 + eps next to the Shannon limit in bits."""
    target = shannon(p, BITS)
    rows = []
    for eps in epsilons:
        below = daroczy(p, 1.0 - eps)
        above = daroczy(p, 1.0 + eps)
        rows.append({
            "epsilon": float(eps),
            "below": below,
            "above": above,
            "shannon_bits": target,
            "max_gap": max(abs(below - target), abs(above - target)),
        })
    return rows


def kolmogorov_nagumo_mean(
    weights: ArrayLike,
    values: ArrayLike,
    phi: Callable[[np.ndarray], np.ndarray],
    phi_inv: Callable[[float], float],
) -> float:
    """Quasi-arithmetic average phi^-1(Sum_k w_k phi(x_k))."""
    w = np.asarray(weights, dtype=float)
    x = np.asarray(values, dtype=float)
    if w.shape != x.shape:
        raise DomainError(f"weights {w.shape} and values {x.shape} differ in shape")
    return float(phi_inv(float(np.sum(w * phi(x)))))


def renyi_phi(alpha: float, base: float = BITS) -> Tuple[Callable, Callable]:
    """Exponential averaging function a^((1-alpha) x) and its inverse.

    Averaging the information contents log_a(1/p_k) with this pair gives
    the Renyi entropy of order alpha.
    """
    alpha = _check_order(alpha)
    if alpha == 1.0:
        raise DomainError("the exponential averaging function degenerates at alpha = 1")
    ln_a = log_factor(base)
    c = (1.0 - alpha) * ln_a

    def phi(x: np.ndarray) -> np.ndarray:
        return np.exp(c * np.asarray(x, dtype=float))

    def phi_inv(y: float) -> float:
        return math.log(y) / c

    return phi, phi_inv


# ──────────────────────────────────────────────────
# Gain and loss of information
# ──────────────────────────────────────────────────

def _warn_pathological(alpha: float, what: str) -> None:
    if alpha > PATHOLOGICAL_ORDER:
        warnings.warn(
            f"{what} at alpha={alpha:g} > 2 is pathological (values are still returned)",
            PathologicalOrderWarning,
            stacklevel=3,
        )


def info_gain(u: ConditionalUpdate, alpha: float, base: float = BITS) -> float:
    """Gain of information about A from observing B_l.

    alpha != 1: (1/(1-alpha)) log_a Sum_k p_k^(2-alpha) p_kl^(alpha-1),
    summed over the prior's support. alpha == 1 returns -KL(p_kl || p_k),
    which is NOT the alpha -> 1 limit of the general formula.
    """
    alpha = _check_order(alpha)
    _warn_pathological(alpha, "info_gain")
    ln_a = log_factor(base)
    p = u.prior.probs
    q = u.posterior.probs
    if alpha == 1.0:
        return -float(np.sum(rel_entr(q, p))) / ln_a

    mask = p > 0.0
    p, q = p[mask], q[mask]
    nonzero = q > 0.0
    if alpha < 1.0 and not np.all(nonzero):
        # q^(alpha-1) diverges on the posterior's zeros.
        return math.inf
    q_pow = np.zeros_like(q)
    q_pow[nonzero] = q[nonzero] ** (alpha - 1.0)
    total = float(np.sum(p ** (2.0 - alpha) * q_pow))
    return math.log(total) / ((1.0 - alpha) * ln_a)


def info_loss(u: ConditionalUpdate, alpha: float, base: float = BITS) -> float:
    """Loss of information: (1/(alpha-1)) log_a Sum_k p_kl^alpha p_k^(1-alpha).

    alpha == 1 returns KL(p_kl || p_k), so info_loss(u, 1) == -info_gain(u, 1).
    """
    alpha = _check_order(alpha)
    _warn_pathological(alpha, "info_loss")
    ln_a = log_factor(base)
    p = u.prior.probs
    q = u.posterior.probs
    if alpha == 1.0:
        return float(np.sum(rel_entr(q, p))) / ln_a

    # Posterior support lies inside the prior's, so p > 0 wherever q > 0.
    mask = q > 0.0
    total = float(np.sum(q[mask] ** alpha * p[mask] ** (1.0 - alpha)))
    return math.log(total) / ((alpha - 1.0) * ln_a)


def gain_vanishing_scan(
    trials: int,
    alphas: Sequence[float],
    seed: int,
    base: float = BITS,
    trace: Any = None,
) -> Dict[str, Any]:
    """Max |info_gain| over random prior/posterior pairs, per order.

    Pairs are drawn from the flat simplex with sizes 2..8. Only the alpha = 2
    column is expected to vanish identically.
    """
    if trials < 1:
        raise DomainError(f"trials must be >= 1, got {trials}")
    if not alphas:
        raise DomainError("at least one alpha is required")
    orders = [_check_order(a) for a in alphas]
    stream = SeededStream(seed)
    max_gain = {a: 0.0 for a in orders}

    with warnings.catch_warnings():
        # The report flags pathological orders itself.
        warnings.simplefilter("ignore", PathologicalOrderWarning)
        for _ in range(trials):
            n = stream.integers(SCAN_SIZES[0], SCAN_SIZES[1] + 1)
            u = ConditionalUpdate(ProbDist(stream.simplex(n)), ProbDist(stream.simplex(n)))
            for a in orders:
                gain = abs(info_gain(u, a, base))
                if gain > max_gain[a]:
                    max_gain[a] = gain

    columns = [
        {
            "alpha": a,
            "max_abs_gain": max_gain[a],
            "vanishes": max_gain[a] <= GAIN_VANISHING_TOL,
            "pathological": a > PATHOLOGICAL_ORDER,
        }
        for a in orders
    ]
    report = {
        "trials": trials,
        "seed": seed,
        "base": float(base),
        "columns": columns,
        "error": None,
    }
    _emit_scan_span(trace, report)
    return report


def _emit_scan_span(trace: Any, report: Dict[str, Any]) -> None:
    try:
        from trace.helpers import emit_deterministic_span
    except ImportError:  # pragma: no cover
        return
    vanishing = [c["alpha"] for c in report["columns"] if c["vanishes"]]
    emit_deterministic_span(
        trace,
        tool="infotheory",
        decision="gain_scan",
        value=",".join(f"{a:g}" for a in vanishing) or "none",
        human_summary=(
            f"{report['trials']} random updates; gain vanished identically for "
            f"alpha in {vanishing or 'no order'}"
        ),
        agent_context=f"columns={report['columns']}",
        stage="ENTROPY",
        inputs={"trials": report["trials"], "seed": report["seed"]},
        outputs={"columns": report["columns"]},
    )


# ──────────────────────────────────────────────────
# Spectra of density matrices
# ──────────────────────────────────────────────────

def _normalized_spectrum(rho: Any) -> np.ndarray:
    from core.matrixcore import as_array

    evals = np.linalg.eigvalsh(as_array(rho))
    evals = np.clip(evals, 0.0, None)
    total = evals.sum()
    if total <= 0.0:
        raise DomainError("state has non-positive trace")
    return evals / total


def quantum_renyi(rho: Any, alpha: float, base: float = BITS) -> float:
    """Renyi entropy of the (trace-normalized) spectrum of a density matrix."""
    spectrum = _normalized_spectrum(rho)
    # Clipping can leave the sum a few ulps from 1.
    p = ProbDist(spectrum / spectrum.sum(), incomplete=True)
    if float(alpha) == 1.0:
        return shannon(p, base)
    return renyi(p, alpha, base)


def linear_entropy_i2(rho: Any) -> float:
    """-ln Tr(rho^2) of the normalized state, in nats."""
    from core.matrixcore import as_array

    arr = as_array(rho)
    tr = float(np.trace(arr).real)
    if tr <= 0.0:
        raise DomainError("state has non-positive trace")
    purity = float(np.vdot(arr, arr).real) / (tr * tr)
    return -math.log(purity)
