"""Exception hierarchy for the Nambu dynamics toolkit.

Every error raised by the core modules derives from NambuError so the CLI
can map whole families onto exit codes:

    DomainError      -> invalid arguments or broken type invariants (exit 1)
    DriftAlarm       -> an integral of motion drifted past its tolerance (exit 2)
    EvolutionError   -> a generator gradient failed part-way through a run (exit 2)

Exceptions carry structured attributes (not just a message) so reports and
trace spans can record what failed without parsing strings.
"""

from __future__ import annotations

from typing import Any, Optional


class NambuError(Exception):
    """Base class for all toolkit errors."""


class DomainError(NambuError, ValueError):
    """An argument lies outside the domain of an operation."""


class SchemaError(DomainError):
    """A config or literal failed to parse. `field` is a dotted path into the input."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class SingularPowerError(DomainError):
    """A non-positive real power was requested on a (near-)zero eigenvalue."""

    def __init__(self, exponent: float, eigenvalue: float):
        self.exponent = exponent
        self.eigenvalue = eigenvalue
        super().__init__(
            f"singular power: exponent {exponent:g} requested on eigenvalue "
            f"{eigenvalue:.3e} (state must be full rank)"
        )


class DimensionMismatchError(DomainError):
    """Two operands (or an operand and a bipartite shape) disagree on dimension."""

    def __init__(self, what: str, expected: int, got: int):
        self.what = what
        self.expected = expected
        self.got = got
        super().__init__(f"dimension mismatch for {what}: expected {expected}, got {got}")


class EvaluationError(NambuError, ArithmeticError):
    """A functional produced a non-finite value while being probed."""


class ConsistencyError(NambuError, ArithmeticError):
    """A bracket that must be real came back with a large imaginary part."""

    def __init__(self, residue: float, tolerance: float):
        self.residue = residue
        self.tolerance = tolerance
        super().__init__(
            f"imaginary residue {residue:.3e} exceeds {tolerance:.1e}; "
            f"a gradient is probably not Hermitian"
        )


class DriftAlarm(NambuError):
    """An integral of motion drifted past the run tolerance.

    `trajectory` holds everything recorded up to (and including) the
    offending step, so callers can still write partial output.
    """

    def __init__(
        self,
        time: float,
        quantity: str,
        drift: float,
        tolerance: float,
        trajectory: Optional[Any] = None,
    ):
        self.time = time
        self.quantity = quantity
        self.drift = drift
        self.tolerance = tolerance
        self.trajectory = trajectory
        super().__init__(
            f"drift alarm at t={time:g}: {quantity} drifted {drift:.3e} "
            f"(tolerance {tolerance:.1e})"
        )


class EvolutionError(NambuError):
    """The right-hand side could not be evaluated during integration."""

    def __init__(self, time: float, cause: BaseException):
        self.time = time
        self.cause = cause
        super().__init__(f"evolution failed at t={time:g}: {cause}")


class PathologicalOrderWarning(UserWarning):
    """Information gain/loss evaluated at an order where it is ill-behaved (alpha > 2)."""
