"""Alpha sweep: one evolution per order, run concurrently, aggregated in order.

Each run owns its EvolutionSpec; nothing mutable is shared between workers.
A failing order (drift alarm, domain error) becomes a row with `error` set
and never aborts the sweep.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from copy import deepcopy
from typing import Any, Dict, List, Sequence

from contracts.config_validator import ConfigViolation
from contracts.reports import SweepRow
from core.dynamics import evolve, oracle_deviation
from core.errors import DomainError, NambuError
from core.generators import describe, speed_factor
from harness.config import build_spec

try:
    from trace.helpers import emit_deterministic_span
except ImportError:  # pragma: no cover
    def emit_deterministic_span(*args, **kwargs):
        pass

logger = logging.getLogger(__name__)

SWEEPABLE_KINDS = {"renyi_hom", "renyi_pure"}

DEFAULT_MAX_WORKERS = 4


def parse_alphas(text: str) -> List[float]:
    """'1.3,1.5,2' -> [1.3, 1.5, 2.0]; empty or unparsable input is a DomainError."""
    chunks = [c.strip() for c in str(text).split(",") if c.strip()]
    if not chunks:
        raise DomainError("at least one alpha is required")
    try:
        return [float(c) for c in chunks]
    except ValueError as exc:
        raise DomainError(f"unparsable alpha list {text!r}: {exc}") from exc


def _with_alpha(config: Dict[str, Any], alpha: float) -> Dict[str, Any]:
    out = deepcopy(config)
    out["generator"]["alpha"] = alpha
    return out


def _sweep_one(config: Dict[str, Any], alpha: float) -> SweepRow:
    row: SweepRow = {
        "alpha": alpha,
        "generator": f"{config['generator']['kind']}(alpha={alpha:g})",
        "pure_state": False,
        "max_eigenvalue_drift": None,
        "max_linear_deviation": None,
        "final_observables": {},
        "error": None,
    }
    try:
        spec = build_spec(_with_alpha(config, alpha))
        row["generator"] = describe(spec.generator)
        row["pure_state"] = spec.rho0.rank == 1
        traj = evolve(spec)
    except ConfigViolation as exc:
        row["error"] = "; ".join(exc.violations)
        return row
    except NambuError as exc:
        row["error"] = f"{type(exc).__name__}: {exc}"
        return row

    row["max_eigenvalue_drift"] = traj.eigenvalue_drift()
    # alpha = 2 is linear for every state; otherwise only normalized pure states are.
    if alpha == 2.0 or (row["pure_state"] and spec.normalize):
        row["max_linear_deviation"] = oracle_deviation(traj, speed_factor(spec.generator))
    row["final_observables"] = dict(traj.diagnostics[-1]["observables"])
    return row


def run_sweep(
    config: Dict[str, Any],
    alphas: Sequence[float],
    max_workers: int = DEFAULT_MAX_WORKERS,
    trace: Any = None,
) -> List[SweepRow]:
    """One run per alpha on a normalized, gated config.

    The base generator must be renyi_hom or renyi_pure. Rows come back in
    the order of `alphas`.
    """
    if not alphas:
        raise DomainError("at least one alpha is required")
    kind = (config.get("generator") or {}).get("kind")
    if kind not in SWEEPABLE_KINDS:
        raise DomainError(f"generator kind {kind!r} has no alpha to sweep; use one of {sorted(SWEEPABLE_KINDS)}")

    workers = max(1, min(max_workers, len(alphas)))
    with ThreadPoolExecutor(max_workers=workers) as executor:
        futures = [executor.submit(_sweep_one, config, float(a)) for a in alphas]
        rows = [f.result() for f in futures]

    for row in rows:
        if row["error"]:
            logger.warning("alpha=%g failed: %s", row["alpha"], row["error"])
        emit_deterministic_span(
            trace,
            tool="sweep",
            decision="sweep_row",
            value=row["alpha"],
            human_summary=(
                f"alpha={row['alpha']:g}: " + (row["error"] or
                f"eigenvalue drift {row['max_eigenvalue_drift']:.3e}")
            ),
            agent_context=f"generator={row['generator']} pure_state={row['pure_state']}",
            stage="SWEEP",
            outputs={
                "max_eigenvalue_drift": row["max_eigenvalue_drift"],
                "max_linear_deviation": row["max_linear_deviation"],
            },
            passed=row["error"] is None,
        )
    return rows
