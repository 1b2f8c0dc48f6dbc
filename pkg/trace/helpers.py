"""Span emission shared by core and harness code.

Functions that make a pass/fail decision accept an optional `trace` and call
emit_deterministic_span() at that point. `trace=None` is a no-op, so callers
never need an if-guard.
"""

from typing import Any, Dict, Optional


def emit_deterministic_span(
    trace: Optional[Any],
    tool: str,
    decision: str,
    value: Any,
    human_summary: str,
    agent_context: str,
    stage: str = "RUN",
    inputs: Optional[Dict[str, Any]] = None,
    outputs: Optional[Dict[str, Any]] = None,
    passed: Optional[bool] = None,
) -> None:
    """Emit one span on `trace` (a RunTrace) if there is one.

    `tool` names the emitting component ("dynamics", "suites.nosignal"),
    `stage` is one of CONFIG, RUN, VERIFY, SWEEP, ENTROPY. `inputs` and
    `outputs` hold a few scalars, never whole trajectories. Leave `passed`
    as None for report-only decisions; the key is then omitted.
    """
    if trace is None:
        return

    # Imported here so core/ has no import-time dependency on trace/.
    from trace.span import TraceSpan

    optional = {"passed": passed, "inputs": inputs, "outputs": outputs}
    span = TraceSpan(
        stage=stage,
        tool=tool,
        decision=decision,
        value=value,
        human_summary=human_summary,
        agent_context=agent_context,
        **{key: item for key, item in optional.items() if item is not None},
    )
    trace.emit(span)
