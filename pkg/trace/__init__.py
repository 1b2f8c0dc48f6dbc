"""Run tracing for the Nambu dynamics toolkit.

One RunTrace per CLI invocation collects decision spans (drift alarms,
property verdicts, sweep rows, gain scans) and config gate events. The
CLI writes it to disk with --trace-out.
"""

from trace.span import TraceSpan, GateSpan
from trace.collector import RunTrace
from trace.helpers import emit_deterministic_span
