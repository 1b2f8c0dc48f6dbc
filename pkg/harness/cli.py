#!/usr/bin/env python3
"""Command-line front end: run, verify, sweep, entropy.

Usage (CLI):
    python harness/cli.py run --config configs/qubit_linear.json --out out/traj.csv
    python harness/cli.py verify --suite nosignal --seed 1 --trials 100
    python harness/cli.py verify --suite conservation --profile acceptance
    python harness/cli.py sweep --config configs/pure_qutrit.json --alphas 1.3,1.5,2,2.5 --out out/sweep.csv
    python harness/cli.py entropy --dist 0.75,0.25 --alpha 2 --base 2

Every subcommand accepts --trace-out PATH (trace JSON) and --log-level.

Exit codes (all subcommands):
    0  success
    1  configuration or input error (missing file, schema violation,
       dimension mismatch, singular power on rho0, bad distribution)
    2  invariant drift alarm, mid-run evolution failure, or a failed
       assertable property in `verify`

Output: `run` prints the RunReport JSON, `sweep` and `entropy` print JSON
results, `verify` prints a property table. Diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
import time
from pathlib import Path
from typing import Any, Dict, List, Optional

if __package__ in (None, ""):
    # Script execution: make the project root importable.
    sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from contracts.config_validator import ConfigViolation
from core.dynamics import evolve
from core.errors import DomainError, DriftAlarm, EvolutionError
from core.formatter import (
    build_run_report,
    format_property_table,
    write_sweep_csv,
    write_trajectory_csv,
)
from core.infotheory import (
    BITS,
    ProbDist,
    daroczy,
    gain_vanishing_scan,
    renyi,
    renyi_star,
    shannon,
)
from harness.config import load_config, load_spec
from harness.suites import SUITE_NAMES, all_passed, expand_suites, run_suites
from harness.sweep import DEFAULT_MAX_WORKERS, parse_alphas, run_sweep
from trace.collector import RunTrace

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_ALARM = 2


class _Parser(argparse.ArgumentParser):
    """Usage errors are input errors (exit 1); exit 2 is reserved for alarms."""

    def error(self, message: str) -> None:
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _fail(message: str, code: int = EXIT_INPUT) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def _write_trace(trace: RunTrace, path: Optional[str]) -> None:
    if not path:
        return
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(trace.to_json())


def _print_json(payload: Any) -> None:
    json.dump(payload, sys.stdout, indent=2, default=str)
    print()


# ──────────────────────────────────────────────────
# run
# ──────────────────────────────────────────────────

def cmd_run(args: argparse.Namespace, trace: RunTrace) -> int:
    start = time.monotonic()
    try:
        config, spec = load_spec(args.config, trace=trace)
    except ConfigViolation as exc:
        return _fail(str(exc))

    warnings = config["_gate"]["warnings"]
    logger.info("run: %s, %d steps", args.config, spec.n_steps)
    try:
        traj = evolve(spec, trace=trace)
    except DriftAlarm as alarm:
        partial = alarm.trajectory
        write_trajectory_csv(partial, args.out)
        _print_json(build_run_report(partial, args.out, time.monotonic() - start, alarm, warnings))
        return _fail(str(alarm), EXIT_ALARM)
    except EvolutionError as exc:
        return _fail(str(exc), EXIT_ALARM)
    except DomainError as exc:
        # Raised before the first step: the generator cannot be evaluated at rho0.
        return _fail(f"{args.config}: {exc}")

    write_trajectory_csv(traj, args.out)
    _print_json(build_run_report(traj, args.out, time.monotonic() - start, warnings=warnings))
    return EXIT_OK


# ──────────────────────────────────────────────────
# verify
# ──────────────────────────────────────────────────

def cmd_verify(args: argparse.Namespace, trace: RunTrace) -> int:
    if args.trials is not None and args.trials < 1:
        return _fail(f"--trials must be >= 1, got {args.trials}")
    names = expand_suites(args.suite)
    try:
        rows = run_suites(names, seed=args.seed, trials=args.trials, trace=trace, profile=args.profile)
    except KeyError as exc:
        return _fail(exc.args[0])
    print(format_property_table(rows))
    return EXIT_OK if all_passed(rows) else EXIT_ALARM


# ──────────────────────────────────────────────────
# sweep
# ──────────────────────────────────────────────────

def cmd_sweep(args: argparse.Namespace, trace: RunTrace) -> int:
    try:
        alphas = parse_alphas(args.alphas)
        config = load_config(args.config, trace=trace)
        rows = run_sweep(config, alphas, max_workers=args.workers, trace=trace)
    except ConfigViolation as exc:
        return _fail(str(exc))
    except DomainError as exc:
        return _fail(str(exc))

    write_sweep_csv(rows, args.out)
    _print_json({"csv_path": args.out, "rows": rows, "error": None})
    return EXIT_OK


# ──────────────────────────────────────────────────
# entropy
# ──────────────────────────────────────────────────

def entropy_values(p: ProbDist, alpha: float, base: float) -> Dict[str, Any]:
    """The four entropies of p; at alpha = 1 the order-dependent ones are their Shannon limits."""
    h = shannon(p, base)
    if alpha == 1.0:
        bits = shannon(p, BITS)
        return {
            "shannon": h,
            "renyi": h,
            "renyi_star": 2.0 ** bits,
            "daroczy": bits,
            "limit": True,
        }
    return {
        "shannon": h,
        "renyi": renyi(p, alpha, base),
        "renyi_star": renyi_star(p, alpha),
        "daroczy": daroczy(p, alpha),
        "limit": False,
    }


def cmd_entropy(args: argparse.Namespace, trace: RunTrace) -> int:
    try:
        p = ProbDist.from_string(args.dist)
        result: Dict[str, Any] = {
            "dist": [float(x) for x in p.probs],
            "alpha": args.alpha,
            "base": args.base,
            **entropy_values(p, args.alpha, args.base),
        }
        if args.scan_trials:
            result["gain_scan"] = gain_vanishing_scan(
                args.scan_trials, (0.5, 1.5, 2.0, 3.0), seed=args.seed, base=args.base, trace=trace,
            )
    except DomainError as exc:
        return _fail(str(exc))
    result["error"] = None
    _print_json(result)
    return EXIT_OK


# ──────────────────────────────────────────────────
# Parser and entry point
# ──────────────────────────────────────────────────

def _finite_float(text: str) -> float:
    value = float(text)
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"expected a finite number, got {text!r}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="nambuq",
        description="Triple-bracket quantum dynamics: simulate, verify, sweep, entropy",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--trace-out", default=None, help="Write the run trace JSON to this path")
    common.add_argument(
        "--log-level", default="WARNING",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help="Diagnostics level on stderr (default: WARNING)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", parents=[common], help="Integrate one config and write a trajectory CSV")
    p_run.add_argument("--config", required=True, help="Path to a JSON (or YAML) simulation config")
    p_run.add_argument("--out", required=True, help="Trajectory CSV path")
    p_run.set_defaults(func=cmd_run)

    p_verify = sub.add_parser("verify", parents=[common], help="Run seeded property suites")
    p_verify.add_argument("--suite", required=True, choices=list(SUITE_NAMES) + ["all"])
    p_verify.add_argument("--seed", type=int, default=None, help="Base seed (default from tolerances.yaml)")
    p_verify.add_argument("--trials", type=int, default=None, help="Trials per property (default per suite)")
    p_verify.add_argument(
        "--profile", default=None,
        help="Trial budget profile from tolerances.yaml (e.g. acceptance: the full acceptance grid)",
    )
    p_verify.set_defaults(func=cmd_verify)

    p_sweep = sub.add_parser("sweep", parents=[common], help="One run per alpha, aggregated to CSV")
    p_sweep.add_argument("--config", required=True, help="Base config with a renyi_hom or renyi_pure generator")
    p_sweep.add_argument("--alphas", required=True, help="Comma-separated orders, e.g. 1.3,1.5,2")
    p_sweep.add_argument("--out", required=True, help="Sweep CSV path")
    p_sweep.add_argument("--workers", type=int, default=DEFAULT_MAX_WORKERS, help="Concurrent runs")
    p_sweep.set_defaults(func=cmd_sweep)

    p_ent = sub.add_parser("entropy", parents=[common], help="Entropies of a probability vector")
    p_ent.add_argument("--dist", required=True, help="Comma-separated probabilities, e.g. 0.5,0.25,0.25")
    p_ent.add_argument("--alpha", required=True, type=_finite_float, help="Order alpha")
    p_ent.add_argument("--base", type=_finite_float, default=BITS, help="Log base (default: 2)")
    p_ent.add_argument("--scan-trials", type=int, default=0,
                       help="Also run the gain-vanishing scan with this many random updates")
    p_ent.add_argument("--seed", type=int, default=1, help="Seed for --scan-trials")
    p_ent.set_defaults(func=cmd_entropy)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, args.log_level),
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    trace = RunTrace(command=" ".join(sys.argv[1:] if argv is None else argv))
    try:
        code = args.func(args, trace)
    finally:
        _write_trace(trace, args.trace_out)
    logger.info("%s finished with exit code %d", args.command, code)
    return code


if __name__ == "__main__":
    sys.exit(main())
