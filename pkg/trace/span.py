"""TraceSpan: the atomic unit of run tracing.

Each span records one decision made while running a command: a config gate
verdict, a drift alarm, a property verdict, a sweep row. Spans have two
audiences:
- human_summary: one plain-English line for someone reading the trace
- agent_context: compact key=value context for tooling that post-processes runs

TypedDict (not dataclass) so traces serialize with plain json.
"""

import time
import uuid
from typing import Any, Dict, List, Optional, TypedDict


class TraceSpan(TypedDict, total=False):
    """A single traced decision.

    Required fields (set by emit()): trace_id, span_id, stage, tool, timestamp_ms.
    """
    # Identity
    trace_id: str
    span_id: str

    # Classification
    stage: str                      # CONFIG | RUN | VERIFY | SWEEP | ENTROPY
    tool: str                       # e.g. "dynamics", "suites.conservation"

    # Decision tracking
    decision: str                   # e.g. "drift_alarm", "property_verdict"
    value: Any
    passed: Optional[bool]          # None for report-only decisions

    # Data
    inputs: Dict[str, Any]
    outputs: Dict[str, Any]

    # Dual-audience summaries
    human_summary: str
    agent_context: str

    timestamp_ms: int


class GateSpan(TypedDict):
    """A config gate event: which rules ran, which failed, at what tier."""
    trace_id: str
    stage: str
    schema: str                     # e.g. "SimConfig"
    passed: bool
    tier: str                       # "hard" | "soft"
    checks: Dict[str, bool]
    violations: List[str]
    timestamp_ms: int


def make_span_id() -> str:
    """Timestamp-prefixed id so spans sort roughly by time."""
    return f"span_{int(time.time() * 1000)}_{uuid.uuid4().hex[:8]}"
