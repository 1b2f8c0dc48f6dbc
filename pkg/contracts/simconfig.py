"""SimConfig contract: the input of `run` and `sweep`.

Configs are JSON (or YAML) objects. Matrices use the literal format from
core.schema: nested rows of numbers or [re, im] pairs, or one of the
diag / pauli / sum shorthands.
"""

from typing import Any, Dict, List, Optional, TypedDict, Union


class RandomStateSpec(TypedDict, total=False):
    """rho0 drawn by core.matrixcore.random_density."""
    dim: int
    rank: int
    seed: int                    # NAMBUQ_SEED overrides this
    min_eigenvalue: float        # default 1e-6


class ObservableSpec(TypedDict):
    """One labeled observable whose average becomes a CSV column."""
    label: str
    matrix: Any                  # matrix literal


class PartSpec(TypedDict, total=False):
    generator: "GeneratorSpec"
    weight: float
    subsystem: Optional[str]     # "first" | "second" | None


class ProfileSpec(TypedDict, total=False):
    form: str                    # "half_square" | "power"
    exponent: float


class GeneratorSpec(TypedDict, total=False):
    kind: str                    # canonical kind or an alias (see core.schema)
    alpha: float
    g: ProfileSpec
    parts: List[PartSpec]


class SimConfig(TypedDict, total=False):
    hamiltonian: Any                                  # matrix literal
    rho0: Union[Any, Dict[str, RandomStateSpec]]      # literal or {"random": {...}}
    generator: GeneratorSpec
    t_final: float
    dt: float
    record_every: int            # default 1
    tolerance: float             # drift alarm threshold, default 1e-6
    normalize: bool              # require Tr rho0 = 1, default True
    outputs: List[ObservableSpec]
    shape: List[int]             # [d1, d2], needed by subsystem parts
