"""Trace schema validation: span shape and verify-run coverage."""

from typing import Dict, Iterable, List, Tuple

VALID_STAGES = {"CONFIG", "RUN", "VERIFY", "SWEEP", "ENTROPY"}

KNOWN_DECISIONS = {
    "config_gate",
    "drift_alarm",
    "invariant_summary",
    "property_verdict",
    "sweep_row",
    "gain_scan",
}


def validate_span_fields(span: Dict) -> Tuple[bool, List[str]]:
    """Required fields: trace_id, stage, tool, timestamp_ms; stage and decision must be known."""
    issues = []
    for field in ("trace_id", "stage", "tool", "timestamp_ms"):
        if field not in span or span[field] is None:
            issues.append(f"Missing required field: {field}")

    if span.get("stage") and span["stage"] not in VALID_STAGES:
        issues.append(f"Invalid stage '{span['stage']}'. Must be one of: {sorted(VALID_STAGES)}")

    decision = span.get("decision")
    if decision and decision not in KNOWN_DECISIONS:
        issues.append(f"Unknown decision '{decision}'")

    if "passed" in span and not isinstance(span["passed"], bool):
        issues.append("Field 'passed' must be a bool when present")

    return (len(issues) == 0, issues)


def validate_trace_completeness(trace_dict: Dict, suites: Iterable[str]) -> Tuple[bool, List[str]]:
    """Check that a verify trace holds at least one property verdict per requested suite."""
    issues = []
    traced = {
        str(s.get("tool", "")).split(".", 1)[-1]
        for s in trace_dict.get("spans", [])
        if s.get("decision") == "property_verdict"
    }
    for suite in suites:
        if suite not in traced:
            issues.append(f"No property verdicts traced for suite: {suite}")

    for span in trace_dict.get("spans", []):
        ok, span_issues = validate_span_fields(span)
        if not ok:
            issues.extend(span_issues)
            break

    return (len(issues) == 0, issues)
