"""Nambu dynamics toolkit: harness.

Config loading, seeded verification suites, the alpha sweep and the
command-line front end (harness/cli.py).
"""
from harness.suites import run_suite, run_suites
from harness.sweep import run_sweep

__all__ = ["run_suite", "run_suites", "run_sweep"]
