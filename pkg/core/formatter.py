"""Formatter: trajectory / sweep CSV, property tables and run reports.

Every float written to a CSV goes through fmt() (12 significant digits,
repr-independent), so identical runs produce byte-identical files.

Column order of the trajectory CSV:
    t, f1..f5, eig_1..eig_d (ascending), S_value, energy, <observable labels...>

Column order of the sweep CSV:
    alpha, generator, pure_state, max_eigenvalue_drift, max_linear_deviation,
    <final observable labels...>, error

Usage (import):
    from core.formatter import write_trajectory_csv, build_run_report
    write_trajectory_csv(traj, "out.csv")
    report = build_run_report(traj, "out.csv", duration_s=0.4)
"""

from __future__ import annotations

import csv
import io
import math
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence

from core.dynamics import N_MOMENTS, TRAJECTORY_PSD_TOL, Trajectory, monitors_positivity
from core.errors import DriftAlarm
from core.generators import describe

SIGNIFICANT_DIGITS = 12


# ──────────────────────────────────────────────────
# Number formatting
# ──────────────────────────────────────────────────

def fmt(x: Optional[float]) -> str:
    """Fixed 12-significant-digit rendering; empty for None."""
    if x is None:
        return ""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if x == 0.0:
        return "0"
    return f"{x:.{SIGNIFICANT_DIGITS}g}"


# ──────────────────────────────────────────────────
# Trajectory CSV
# ──────────────────────────────────────────────────

def trajectory_columns(traj: Trajectory) -> List[str]:
    spec = traj.spec
    return (
        ["t"]
        + [f"f{k}" for k in range(1, N_MOMENTS + 1)]
        + [f"eig_{i}" for i in range(1, spec.dim + 1)]
        + ["S_value", "energy"]
        + [label for label, _ in spec.observables]
    )


def trajectory_rows(traj: Trajectory) -> List[List[str]]:
    labels = [label for label, _ in traj.spec.observables]
    rows = []
    for d in traj.diagnostics:
        row = [fmt(d["time"])]
        row += [fmt(v) for v in d["moments"]]
        row += [fmt(v) for v in d["eigenvalues"]]
        row += [fmt(d["entropy_value"]), fmt(d["energy"])]
        row += [fmt(d["observables"][label]) for label in labels]
        rows.append(row)
    return rows


def _write_csv(header: Sequence[str], rows: Iterable[Sequence[str]], out_path: Optional[str]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    text = buf.getvalue()
    if out_path is not None:
        path = Path(out_path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    return text


def write_trajectory_csv(traj: Trajectory, out_path: Optional[str] = None) -> str:
    """Render (and optionally write) the trajectory CSV. Returns the text."""
    return _write_csv(trajectory_columns(traj), trajectory_rows(traj), out_path)


# ──────────────────────────────────────────────────
# Run report
# ──────────────────────────────────────────────────

def _check(quantity: str, drift: float, tolerance: float, monitored: bool) -> Dict[str, Any]:
    return {
        "quantity": quantity,
        "max_drift": drift,
        "tolerance": tolerance,
        "passed": drift <= tolerance,
        "monitored": monitored,
    }


def invariant_checks(traj: Trajectory) -> List[Dict[str, Any]]:
    """Per-invariant max drift over a trajectory, each with the tolerance it is judged against.

    `monitored` marks what the drift alarm watches. The rest is reported only:
    with subsystem parts the full-state moments are not conserved and the
    state may lose positivity, which shows up here as a failed entry.
    """
    spec = traj.spec
    tol = spec.tolerance
    checks = [_check(q, drift, tol, True) for q, drift in traj.conserved_drift().items()]
    isospectral = monitors_positivity(spec.generator)
    if not isospectral:
        checks += [_check(f"f{k + 1}", drift, tol, False) for k, drift in enumerate(traj.moment_drift())]
    checks.append(_check("eigenvalues", traj.eigenvalue_drift(), tol, False))
    checks.append(_check("positivity", max(0.0, -traj.min_eigenvalue()), TRAJECTORY_PSD_TOL, isospectral))
    if isospectral:
        checks.append(_check("S_value", traj.generator_drift(), tol, False))
    checks.append(_check("energy", traj.energy_drift(), tol, False))
    return checks


def build_run_report(
    traj: Trajectory,
    csv_path: Optional[str],
    duration_s: float,
    alarm: Optional[DriftAlarm] = None,
    warnings: Optional[List[str]] = None,
) -> Dict[str, Any]:
    spec = traj.spec
    report: Dict[str, Any] = {
        "csv_path": csv_path,
        "generator": describe(spec.generator),
        "dim": spec.dim,
        "steps": spec.n_steps,
        "records": len(traj),
        "invariants": invariant_checks(traj),
        "alarm": None,
        "warnings": list(warnings or []),
        "duration_s": round(duration_s, 6),
        "error": None,
    }
    if alarm is not None:
        report["alarm"] = {
            "time": alarm.time,
            "quantity": alarm.quantity,
            "drift": alarm.drift,
            "tolerance": alarm.tolerance,
        }
        report["error"] = str(alarm)
    return report


# ──────────────────────────────────────────────────
# Property table (verify)
# ──────────────────────────────────────────────────

PROPERTY_COLUMNS = ("suite", "property", "max_deviation", "comparison", "tolerance", "verdict", "trials")


def _verdict(row: Dict[str, Any]) -> str:
    if row.get("mode") == "report" or row.get("passed") is None:
        return "report"
    return "PASS" if row["passed"] else "FAIL"


def format_property_table(rows: List[Dict[str, Any]]) -> str:
    """Plain-text table: one line per property, columns aligned."""
    table = [list(PROPERTY_COLUMNS)]
    for row in rows:
        table.append([
            row["suite"],
            row["property"],
            f"{row['max_deviation']:.3e}",
            row.get("comparison", "<="),
            f"{row['tolerance']:.1e}",
            _verdict(row),
            str(row.get("trials", "")),
        ])
    widths = [max(len(r[i]) for r in table) for i in range(len(PROPERTY_COLUMNS))]
    lines = ["  ".join(cell.ljust(w) for cell, w in zip(r, widths)).rstrip() for r in table]
    lines.insert(1, "  ".join("-" * w for w in widths))

    failed = [r for r in rows if r.get("mode") != "report" and r.get("passed") is False]
    reported = [r for r in rows if _verdict(r) == "report"]
    lines.append("")
    lines.append(
        f"{len(rows) - len(failed) - len(reported)} passed, {len(failed)} failed, "
        f"{len(reported)} report-only"
    )
    return "\n".join(lines)


# ──────────────────────────────────────────────────
# Sweep CSV
# ──────────────────────────────────────────────────

def sweep_columns(rows: List[Dict[str, Any]]) -> List[str]:
    labels: List[str] = []
    for row in rows:
        for label in row.get("final_observables") or {}:
            if label not in labels:
                labels.append(label)
    return (
        ["alpha", "generator", "pure_state", "max_eigenvalue_drift", "max_linear_deviation"]
        + labels
        + ["error"]
    )


def write_sweep_csv(rows: List[Dict[str, Any]], out_path: Optional[str] = None) -> str:
    header = sweep_columns(rows)
    labels = header[5:-1]
    body = []
    for row in rows:
        obs = row.get("final_observables") or {}
        body.append(
            [fmt(row["alpha"]), row.get("generator", ""), str(bool(row.get("pure_state"))).lower(),
             fmt(row.get("max_eigenvalue_drift")), fmt(row.get("max_linear_deviation"))]
            + [fmt(obs.get(label)) for label in labels]
            + [row.get("error") or ""]
        )
    return _write_csv(header, body, out_path)
