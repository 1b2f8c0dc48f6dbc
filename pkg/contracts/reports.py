"""Report contracts: what `run`, `verify` and `sweep` produce.

Every drift is reported next to the tolerance it was judged against.
"""

from typing import Dict, List, Optional, TypedDict


class InvariantCheck(TypedDict):
    quantity: str                # e.g. "f2", "f2[first]", "eigenvalues", "S_value", "energy"
    max_drift: float
    tolerance: float
    passed: bool
    monitored: bool              # watched by the drift alarm; otherwise reported only


class RunReport(TypedDict, total=False):
    csv_path: str
    generator: str
    dim: int
    steps: int
    records: int
    invariants: List[InvariantCheck]
    alarm: Optional[Dict[str, object]]   # time / quantity / drift / tolerance when aborted
    warnings: List[str]                  # soft config gate warnings
    duration_s: float
    error: Optional[str]


class PropertyRow(TypedDict, total=False):
    suite: str
    property: str
    max_deviation: float
    tolerance: float
    comparison: str              # "<=" (deviation bounded) or ">" (bounded away from 0)
    mode: str                    # "assert" | "report"
    passed: Optional[bool]       # None for report-only rows
    trials: int
    detail: str


class SweepRow(TypedDict, total=False):
    alpha: float
    generator: str
    pure_state: bool
    max_eigenvalue_drift: Optional[float]
    max_linear_deviation: Optional[float]    # vs exact_linear at the pure-state speed factor
    final_observables: Dict[str, float]
    error: Optional[str]
