"""Integration of i drho/dt = [H, dS(rho)] and its diagnostics.

Usage (from Python):
    from core.dynamics import EvolutionSpec, evolve, exact_linear
    spec = EvolutionSpec(hamiltonian=H, generator=RenyiHomogeneous(1.5),
                         rho0=rho0, t_final=5.0, dt=1e-3, record_every=100)
    traj = evolve(spec)
    traj.eigenvalue_drift()

For full-space generators the flow is isospectral, so the number of nonzero
eigenvalues of rho0 is conserved. evolve() counts it once and restricts every
real power to that many leading eigenvalues; Runge-Kutta stage states
otherwise grow spurious O(dt^2) eigenvalues that rho^(alpha-1) amplifies for
alpha < 2.

Generators with parts acting on a subsystem are not isospectral: the full
state's moments change and it may leave the positive cone. What they conserve
is S itself and, when every part acts on a subsystem, the moments of both
reduced states (hence every sub-entropy). The drift alarm watches exactly the
integrals of motion the generator has; see conserved_quantities().
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Dict, List, Optional, Tuple, TypedDict

import numpy as np

from core.errors import (
    DimensionMismatchError,
    DomainError,
    DriftAlarm,
    EvolutionError,
)
from core.generators import (
    Composite,
    EntropyGenerator,
    SmoothF2,
    describe,
    gradient_array,
    part_value,
    speed_factor,
    uses_subsystems,
    value_array,
)
from core.matrixcore import (
    KEEP_CHOICES,
    KEEP_FIRST,
    BipartiteShape,
    DensityMatrix,
    HermitianMatrix,
    MatrixLike,
    as_array,
    partial_trace,
    partial_trace_array,
    trace_distance,
)

try:
    from trace.helpers import emit_deterministic_span
except ImportError:  # pragma: no cover
    def emit_deterministic_span(*args, **kwargs):
        pass

# ──────────────────────────────────────────────────
# Constants
# ──────────────────────────────────────────────────

N_MOMENTS = 5

# Recorded states may dip this far below zero after long integrations.
TRAJECTORY_PSD_TOL = 1e-8

NORMALIZATION_TOL = 1e-10


# ──────────────────────────────────────────────────
# Types
# ──────────────────────────────────────────────────

@dataclass(frozen=True)
class EvolutionSpec:
    hamiltonian: HermitianMatrix
    generator: EntropyGenerator
    rho0: DensityMatrix
    t_final: float
    dt: float
    record_every: int = 1
    tolerance: float = 1e-6
    normalize: bool = True
    observables: Tuple[Tuple[str, HermitianMatrix], ...] = ()
    # False records drift without raising DriftAlarm (convergence studies).
    alarm: bool = True

    def __post_init__(self) -> None:
        dim = self.rho0.dim
        if self.hamiltonian.dim != dim:
            raise DimensionMismatchError("hamiltonian vs rho0", dim, self.hamiltonian.dim)
        if not math.isfinite(self.t_final) or self.t_final < 0.0:
            raise DomainError(f"t_final must be >= 0, got {self.t_final}")
        if not math.isfinite(self.dt) or self.dt <= 0.0:
            raise DomainError(f"dt must be > 0, got {self.dt}")
        if self.t_final > 0.0 and self.dt > self.t_final:
            raise DomainError(f"dt ({self.dt:g}) exceeds t_final ({self.t_final:g})")
        if int(self.record_every) != self.record_every or self.record_every < 1:
            raise DomainError(f"record_every must be a positive integer, got {self.record_every}")
        if not self.tolerance > 0.0:
            raise DomainError(f"tolerance must be > 0, got {self.tolerance}")
        if self.normalize and abs(self.rho0.trace() - 1.0) > NORMALIZATION_TOL:
            raise DomainError(
                f"rho0 has trace {self.rho0.trace():.12g}; set normalize=false to evolve unnormalized states"
            )
        if isinstance(self.generator, Composite) and self.generator.shape is not None:
            self.generator.shape.check(dim, "rho0")
        for label, obs in self.observables:
            if obs.dim != dim:
                raise DimensionMismatchError(f"observable {label!r}", dim, obs.dim)
        object.__setattr__(self, "observables", tuple(self.observables))

    @property
    def dim(self) -> int:
        return self.rho0.dim

    @property
    def n_steps(self) -> int:
        if self.t_final == 0.0:
            return 0
        return max(1, int(math.ceil(self.t_final / self.dt - 1e-9)))

    def with_generator(self, generator: EntropyGenerator) -> "EvolutionSpec":
        return replace(self, generator=generator)


class StepDiagnostics(TypedDict):
    time: float
    moments: List[float]
    eigenvalues: List[float]
    entropy_value: float
    energy: float
    observables: Dict[str, float]
    conserved: Dict[str, float]


@dataclass
class Trajectory:
    spec: EvolutionSpec
    times: List[float] = field(default_factory=list)
    states: List[DensityMatrix] = field(default_factory=list)
    diagnostics: List[StepDiagnostics] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.times)

    @property
    def final_state(self) -> DensityMatrix:
        return self.states[-1]

    def _series(self, key: str) -> np.ndarray:
        return np.array([d[key] for d in self.diagnostics], dtype=float)

    def moment_drift(self) -> List[float]:
        """Max relative drift of f_1..f_5 over the trajectory."""
        m = self._series("moments")
        return [float(v) for v in np.max(np.abs(m - m[0]) / np.abs(m[0]), axis=0)]

    def eigenvalue_drift(self) -> float:
        """Max elementwise drift of the sorted spectrum."""
        e = self._series("eigenvalues")
        return float(np.max(np.abs(e - e[0])))

    def min_eigenvalue(self) -> float:
        return float(np.min(self._series("eigenvalues")))

    def generator_drift(self) -> float:
        v = self._series("entropy_value")
        return float(np.max(np.abs(v - v[0])) / abs(v[0]))

    def energy_drift(self) -> float:
        e = self._series("energy")
        return float(np.max(np.abs(e - e[0])) / max(1.0, abs(e[0])))

    def conserved_drift(self) -> Dict[str, float]:
        """Max relative drift of every quantity the drift alarm watches."""
        ref = self.diagnostics[0]["conserved"]
        worst = dict.fromkeys(ref, 0.0)
        for d in self.diagnostics[1:]:
            for key, drift in relative_drift(ref, d["conserved"]).items():
                worst[key] = max(worst[key], drift)
        return worst


def relative_drift(ref: Dict[str, float], current: Dict[str, float]) -> Dict[str, float]:
    return {
        key: abs(current[key] - v0) / abs(v0) if v0 != 0.0 else abs(current[key])
        for key, v0 in ref.items()
    }


def monitors_positivity(s: EntropyGenerator) -> bool:
    """Positivity is only guaranteed (and alarmed) for isospectral flows."""
    return not uses_subsystems(s)


def conserved_quantities(s: EntropyGenerator, arr: np.ndarray, moments: List[float], entropy_value: float) -> Dict[str, float]:
    """The integrals of motion of generator `s`, evaluated at state `arr`.

    Full-space generators: the moments f1..f5. Generators with subsystem
    parts: S_value, plus f1..f5 of each reduced state ("f2[first]") when
    every part acts on a subsystem.
    """
    if not uses_subsystems(s):
        return {f"f{k}": v for k, v in enumerate(moments, start=1)}
    out = {"S_value": entropy_value}
    if all(p.on_subsystem for p in s.parts):
        for keep in KEEP_CHOICES:
            evals = np.linalg.eigvalsh(partial_trace_array(arr, s.shape, keep))
            for k in range(1, N_MOMENTS + 1):
                out[f"f{k}[{keep}]"] = float(np.sum(evals ** k))
    return out


# ──────────────────────────────────────────────────
# Right-hand side and integration
# ──────────────────────────────────────────────────

def initial_support_rank(rho0: DensityMatrix) -> Optional[int]:
    """Rank of rho0, or None when it is full rank (nothing to restrict)."""
    rank = rho0.rank
    return None if rank == rho0.dim else rank


def _field(h: np.ndarray, generator: EntropyGenerator, support_rank: Optional[int]) -> Callable[[np.ndarray], np.ndarray]:
    def rhs_array(arr: np.ndarray) -> np.ndarray:
        g = gradient_array(generator, arr, support_rank)
        return -1j * (h @ g - g @ h)
    return rhs_array


def rhs(rho: MatrixLike, spec: EvolutionSpec, *, support_rank: Optional[int] = None) -> HermitianMatrix:
    """drho/dt = -i [H, dS(rho)]."""
    f = _field(spec.hamiltonian.data, spec.generator, support_rank)
    return HermitianMatrix(f(as_array(rho)))


def rk4_step(state: np.ndarray, dt: float, f: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    k1 = f(state)
    k2 = f(state + 0.5 * dt * k1)
    k3 = f(state + 0.5 * dt * k2)
    k4 = f(state + dt * k3)
    return state + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _diagnose(spec: EvolutionSpec, arr: np.ndarray, t: float, support_rank: Optional[int]):
    evals = np.linalg.eigvalsh(arr)
    tr = float(np.trace(arr).real)
    observables = {
        label: float(np.sum(arr * obs.data.T).real) / tr for label, obs in spec.observables
    }
    moments = [float(np.sum(evals ** k)) for k in range(1, N_MOMENTS + 1)]
    s_value = value_array(spec.generator, arr, support_rank)
    diag: StepDiagnostics = {
        "time": t,
        "moments": moments,
        "eigenvalues": [float(x) for x in evals],
        "entropy_value": s_value,
        "energy": float(np.sum(arr * spec.hamiltonian.data.T).real),
        "observables": observables,
        "conserved": conserved_quantities(spec.generator, arr, moments, s_value),
    }
    return evals, diag


def evolve(spec: EvolutionSpec, trace: Any = None) -> Trajectory:
    """Fixed-step RK4 with re-Hermitization and a drift alarm.

    Drift is checked at recorded steps: any conserved quantity q with
    |q(t) - q(0)| / |q(0)| above spec.tolerance, or (isospectral flows only)
    a recorded eigenvalue below -1e-8, raises DriftAlarm carrying the partial
    trajectory. spec.alarm=False records the drift without raising.
    """
    h = spec.hamiltonian.data
    support_rank = initial_support_rank(spec.rho0)
    state = np.array(spec.rho0.data, dtype=complex)

    # Domain errors on rho0 itself (e.g. alpha < 1 on a rank-deficient state) surface unwrapped.
    gradient_array(spec.generator, state, support_rank)

    traj = Trajectory(spec=spec)
    evals, diag0 = _diagnose(spec, state, 0.0, support_rank)
    traj.times.append(0.0)
    traj.states.append(spec.rho0)
    traj.diagnostics.append(diag0)

    f = _field(h, spec.generator, support_rank)
    n_steps = spec.n_steps
    t = 0.0
    for step in range(1, n_steps + 1):
        t_next = spec.t_final if step == n_steps else step * spec.dt
        try:
            state = rk4_step(state, t_next - t, f)
        except DomainError as exc:
            raise EvolutionError(t, exc) from exc
        state = (state + state.conj().T) / 2.0
        t = t_next

        if step % spec.record_every != 0 and step != n_steps:
            continue
        evals, diag = _diagnose(spec, state, t, support_rank)
        traj.times.append(t)
        traj.states.append(DensityMatrix.trusted(state, evals))
        traj.diagnostics.append(diag)
        if spec.alarm:
            _check_drift(spec, traj, diag["conserved"], float(evals[0]), t, trace)

    _emit_summary(spec, traj, trace)
    return traj


def _check_drift(spec, traj, current, min_eig, t, trace) -> None:
    drifts = relative_drift(traj.diagnostics[0]["conserved"], current)
    quantity = max(drifts, key=drifts.get)
    drift, tol = drifts[quantity], spec.tolerance
    if monitors_positivity(spec.generator) and min_eig < -TRAJECTORY_PSD_TOL:
        quantity, drift, tol = "positivity", -min_eig, TRAJECTORY_PSD_TOL
    elif drift <= spec.tolerance:
        return
    emit_deterministic_span(
        trace,
        tool="dynamics",
        decision="drift_alarm",
        value=quantity,
        human_summary=f"{quantity} drifted {drift:.3e} at t={t:g} (tolerance {tol:.1e})",
        agent_context=f"generator={describe(spec.generator)} dt={spec.dt:g} step_time={t:g}",
        stage="RUN",
        outputs={"time": t, "drift": drift, "tolerance": tol},
        passed=False,
    )
    raise DriftAlarm(t, quantity, drift, tol, trajectory=traj)


def _emit_summary(spec: EvolutionSpec, traj: Trajectory, trace: Any) -> None:
    if trace is None:
        return
    drift = max(traj.conserved_drift().values())
    emit_deterministic_span(
        trace,
        tool="dynamics",
        decision="invariant_summary",
        value=drift,
        human_summary=f"{len(traj)} records to t={traj.times[-1]:g}; max conserved-quantity drift {drift:.3e}",
        agent_context=(
            f"generator={describe(spec.generator)} eig_drift={traj.eigenvalue_drift():.3e} "
            f"S_drift={traj.generator_drift():.3e}"
        ),
        stage="RUN",
        passed=drift <= spec.tolerance,
    )


# ──────────────────────────────────────────────────
# Oracles and derived checks
# ──────────────────────────────────────────────────

def exact_linear(hamiltonian: MatrixLike, rho0: MatrixLike, t: float) -> DensityMatrix:
    """U rho0 U^dagger with U = exp(-iHt) from the spectral decomposition of H."""
    evals, evecs = np.linalg.eigh(as_array(hamiltonian))
    u = (evecs * np.exp(-1j * evals * t)) @ evecs.conj().T
    out = u @ as_array(rho0) @ u.conj().T
    return DensityMatrix((out + out.conj().T) / 2.0)


def oracle_deviation(traj: Trajectory, rate: float = 1.0) -> float:
    """Max trace distance between recorded states and exact_linear at rate * t."""
    spec = traj.spec
    return max(
        trace_distance(state, exact_linear(spec.hamiltonian, spec.rho0, rate * t))
        for t, state in zip(traj.times, traj.states)
    )


def observable_average(traj: Trajectory, obs: MatrixLike) -> List[float]:
    """Tr(rho_t F) / Tr(rho_t) at every recorded time."""
    a = as_array(obs)
    if a.shape[0] != traj.spec.dim:
        raise DimensionMismatchError("observable vs state", traj.spec.dim, a.shape[0])
    return [float(np.sum(s.data * a.T).real) / s.trace() for s in traj.states]


def time_rescaling_check(
    g: SmoothF2,
    hamiltonian: HermitianMatrix,
    rho0: DensityMatrix,
    t_final: float,
    dt: float,
    record_every: int = 1,
    trace: Any = None,
) -> float:
    """Deviation of a S = g(f2) run from the linear flow at the rescaled time C0 t.

    C0 = 2 g'(f2[rho0]) is itself an integral of motion.
    """
    if not isinstance(g, SmoothF2):
        raise DomainError(f"time rescaling needs a smooth_f2 generator, got {describe(g)}")
    arr = rho0.data
    c0 = 2.0 * float(g.profile.dg(float(np.vdot(arr, arr).real)))
    spec = EvolutionSpec(
        hamiltonian=hamiltonian,
        generator=g,
        rho0=rho0,
        t_final=t_final,
        dt=dt,
        record_every=record_every,
        normalize=False,
    )
    return oracle_deviation(evolve(spec, trace=trace), rate=c0)


def reduced_trajectory(traj: Trajectory, shape: BipartiteShape, keep: str = KEEP_FIRST) -> List[DensityMatrix]:
    """Reduced states rho_k(t) along a trajectory."""
    shape.check(traj.spec.dim)
    return [partial_trace(state, shape, keep) for state in traj.states]


def _subsystem_composite(spec: EvolutionSpec, shape: BipartiteShape) -> Composite:
    s = spec.generator
    if not isinstance(s, Composite) or not all(p.on_subsystem for p in s.parts):
        raise DomainError("sub-entropy check needs a composite generator whose parts all act on subsystems")
    shape.check(spec.dim)
    if s.shape != shape:
        raise DimensionMismatchError(
            "generator subsystem shape vs requested shape", shape.dim, s.shape.dim if s.shape else 0
        )
    return s


def _part_values(s: Composite, traj: Trajectory) -> np.ndarray:
    """values[t, k] = S_k evaluated on its (reduced) state at recorded time t."""
    return np.array([
        [part_value(p, state.data) for p in s.parts]
        for state in traj.states
    ])


def subentropy_conservation_check(spec: EvolutionSpec, shape: BipartiteShape, trace: Any = None) -> List[float]:
    """Max relative drift of each part S_k[rho_k(t)] along the evolution of `spec`."""
    s = _subsystem_composite(spec, shape)
    traj = evolve(spec, trace=trace)
    values = _part_values(s, traj)
    return [float(x) for x in np.max(np.abs(values - values[0]) / np.abs(values[0]), axis=0)]


def isolation_diagnostics(traj: Trajectory) -> List[Dict[str, Any]]:
    """Per part: the series p_k S / S_k and its max relative drift.

    The ratio is an integral of motion for non-interacting Hamiltonians and
    depends on initial conditions; it is reported, never asserted.
    """
    s = traj.spec.generator
    if not isinstance(s, Composite):
        raise DomainError("isolation diagnostics need a composite generator")
    values = _part_values(s, traj)
    total = np.array([d["entropy_value"] for d in traj.diagnostics])
    rows = []
    for k, part in enumerate(s.parts):
        series = part.weight * total / values[:, k]
        rows.append({
            "part": describe(part.generator),
            "subsystem": part.subsystem,
            "weight": part.weight,
            "initial": float(series[0]),
            "max_relative_drift": float(np.max(np.abs(series - series[0])) / abs(series[0])),
            "series": [float(x) for x in series],
        })
    return rows


def convergence_order(spec: EvolutionSpec, rate: Optional[float] = None) -> Dict[str, float]:
    """Max oracle deviation at dt and dt/2 (same recorded times) and their ratio.

    `rate` defaults to the generator's pure-state speed factor. Both runs
    have the drift alarm off; their conserved-quantity drift is reported.
    """
    if rate is None:
        rate = speed_factor(spec.generator)
    coarse_spec = replace(spec, alarm=False)
    fine_spec = replace(coarse_spec, dt=spec.dt / 2.0, record_every=2 * spec.record_every)
    coarse_traj, fine_traj = evolve(coarse_spec), evolve(fine_spec)
    coarse = oracle_deviation(coarse_traj, rate)
    fine = oracle_deviation(fine_traj, rate)
    return {
        "dt": spec.dt,
        "deviation": coarse,
        "half_dt_deviation": fine,
        "ratio": coarse / fine if fine > 0.0 else math.inf,
        "drift": max(coarse_traj.conserved_drift().values()),
        "half_dt_drift": max(fine_traj.conserved_drift().values()),
    }
