"""Contracts for the Nambu dynamics toolkit.

TypedDicts declare the shape of configs and reports (plain dicts at
runtime, so they serialize with json). The config validator enforces the
substance: rule functions grouped into hard and soft gate tiers.
"""

from contracts.simconfig import SimConfig, GeneratorSpec, RandomStateSpec, ObservableSpec
from contracts.reports import InvariantCheck, RunReport, PropertyRow, SweepRow
from contracts.config_validator import validate_config, ConfigViolation
