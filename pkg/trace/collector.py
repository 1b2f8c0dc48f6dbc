"""RunTrace: collects spans across one CLI invocation.

`context_for()` returns a character-budgeted summary per stage so that long
verify runs (hundreds of property verdicts) stay readable; it includes
decision values and verdicts but never inputs/outputs.
"""

import json
import time
import uuid
from collections import Counter
from typing import Any, Dict, List, Optional

from trace.span import GateSpan, TraceSpan, make_span_id

TRUNCATION_MARK = "\n\n[... truncated to budget]"


def _now_ms() -> int:
    return int(time.time() * 1000)


def _verdict_label(span: TraceSpan) -> str:
    if "passed" not in span:
        return ""
    return " [PASS]" if span["passed"] else " [FAIL]"


class RunTrace:
    """Accumulates trace spans for a single command.

    Usage:
        trace = RunTrace(command="verify --suite nosignal")
        rows = run_suite("nosignal", seed=1, trace=trace)
        Path("trace.json").write_text(trace.to_json())
    """

    def __init__(self, command: str, trace_id: Optional[str] = None):
        self.trace_id = trace_id or f"run_{uuid.uuid4().hex[:12]}"
        self.command = command
        self.created_at_ms = _now_ms()
        self._spans: List[TraceSpan] = []
        self._gates: List[GateSpan] = []

    def emit(self, span: TraceSpan) -> None:
        """Record a decision span; identity fields the caller left out are filled in."""
        span.setdefault("trace_id", self.trace_id)
        span.setdefault("span_id", make_span_id())
        span.setdefault("timestamp_ms", _now_ms())
        self._spans.append(span)

    def emit_gate(
        self,
        stage: str,
        schema: str,
        passed: bool,
        tier: str,
        checks: Dict[str, bool],
        violations: Optional[List[str]] = None,
    ) -> None:
        """Record a config gate event (called by contracts.config_validator)."""
        self._gates.append(GateSpan(
            trace_id=self.trace_id,
            stage=stage,
            schema=schema,
            passed=passed,
            tier=tier,
            checks=dict(checks),
            violations=list(violations or []),
            timestamp_ms=_now_ms(),
        ))

    @property
    def spans(self) -> List[TraceSpan]:
        return list(self._spans)

    def spans_for_stage(self, stage: str) -> List[TraceSpan]:
        return [s for s in self._spans if s.get("stage") == stage]

    def gate_for_stage(self, stage: str) -> Optional[GateSpan]:
        """Most recent gate event for a stage."""
        for gate in reversed(self._gates):
            if gate["stage"] == stage:
                return gate
        return None

    def verdict_counts(self) -> Dict[str, int]:
        """passed / failed / report_only over property_verdict spans."""
        tally = Counter(
            "report_only" if "passed" not in s else ("passed" if s["passed"] else "failed")
            for s in self._spans
            if s.get("decision") == "property_verdict"
        )
        return {key: tally.get(key, 0) for key in ("passed", "failed", "report_only")}

    def context_for(self, stage: str, max_chars: int = 6000) -> str:
        """Budgeted text summary of one stage."""
        spans = self.spans_for_stage(stage)
        gate = self.gate_for_stage(stage)
        if not spans and gate is None:
            return f"[No trace data for stage {stage}]"

        lines = [f"=== {stage} Summary ===", f"Command: {self.command}"]
        if spans:
            lines += ["", "Decisions:"]
            for span in spans:
                lines.append(
                    f"  - {span.get('decision', 'unknown')} = {span.get('value', 'N/A')}{_verdict_label(span)}"
                )
                if span.get("agent_context"):
                    lines.append(f"    Context: {span['agent_context']}")
        if gate is not None:
            status = "PASSED" if gate["passed"] else f"FAILED (tier={gate['tier']})"
            lines += ["", f"Gate {gate['schema']}: {status}"]
            lines += [f"  WARNING: {v}" for v in gate["violations"]]

        text = "\n".join(lines)
        if len(text) <= max_chars:
            return text
        return text[: max_chars - len(TRUNCATION_MARK)] + TRUNCATION_MARK

    def to_dict(self) -> Dict[str, Any]:
        stages = sorted({s.get("stage", "unknown") for s in self._spans})
        return {
            "trace_id": self.trace_id,
            "command": self.command,
            "created_at_ms": self.created_at_ms,
            "spans": self._spans,
            "gates": self._gates,
            "summary": {
                "total_spans": len(self._spans),
                "total_gates": len(self._gates),
                "stages_covered": stages,
                "verdicts": self.verdict_counts(),
            },
        }

    def to_json(self, indent: int = 2) -> str:
        # default=str: span values may be numpy scalars
        return json.dumps(self.to_dict(), indent=indent, default=str)

    @classmethod
    def from_json(cls, json_str: str) -> "RunTrace":
        payload = json.loads(json_str)
        restored = cls(command=payload["command"], trace_id=payload["trace_id"])
        restored.created_at_ms = payload["created_at_ms"]
        restored._spans = list(payload.get("spans", []))
        restored._gates = list(payload.get("gates", []))
        return restored
