"""Verification suites: seeded property checks behind `verify --suite S`.

Each suite draws its fixtures from one SeededStream (every property gets its
own spawned child, so adding trials to one property never shifts another)
and returns PropertyRow dicts. Rows with mode "report" carry no verdict;
`verify` exits 0 iff every assertable row passed.

Suites:
    entropy       gain scan, uniform / Shannon-limit / monotonicity identities
    brackets      closed-form gradients, alpha = 2 collapse, homogeneity,
                  antisymmetry, Casimirs
    nosignal      {F_1, G_2}_S = 0 for local functionals of a bipartite state
    jacobi        Jacobi defect (asserted for S2 and g(f2), reported otherwise)
    conservation  linear oracle, pure-state linearity, spectra, moments,
                  time rescaling, speed factors, sub-entropies, integrator order

Usage (from Python):
    from harness.suites import run_suite
    rows = run_suite("nosignal", seed=1, trials=100)
"""

from __future__ import annotations

import logging
import math
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np

from contracts.reports import PropertyRow
from core.brackets import (
    Functional,
    bbmj_bracket,
    jacobi_defect,
    local_bracket_check,
    moment_casimir_check,
    triple_bracket,
)
from core.dynamics import (
    EvolutionSpec,
    convergence_order,
    evolve,
    isolation_diagnostics,
    oracle_deviation,
    subentropy_conservation_check,
    time_rescaling_check,
)
from core.errors import NambuError
from core.generators import (
    Composite,
    CompositePart,
    EntropyGenerator,
    Quadratic,
    RenyiHomogeneous,
    RenyiPure,
    ScalarProfile,
    SmoothF2,
    check_homogeneity,
    describe,
    gradient_array,
    speed_factor,
    value_array,
)
from core.infotheory import (
    ProbDist,
    daroczy_limit_sweep,
    gain_vanishing_scan,
    kolmogorov_nagumo_mean,
    renyi,
    renyi_phi,
    shannon,
)
from core.matrixcore import (
    PAULI,
    BipartiteShape,
    DensityMatrix,
    HermitianMatrix,
    functional_gradient_fd,
    random_density,
    random_hermitian,
)
from core.rng import SeededStream, resolve_seed
from harness.config import load_tolerances, suite_settings

try:
    from trace.helpers import emit_deterministic_span
except ImportError:  # pragma: no cover
    def emit_deterministic_span(*args, **kwargs):
        pass

logger = logging.getLogger(__name__)

SUITE_NAMES = ("entropy", "brackets", "nosignal", "jacobi", "conservation")

# Mixed-state fixtures keep every eigenvalue at least this large.
MIXED_MIN_EIGENVALUE = 0.02

# Spectral norm of suite Hamiltonians; the order check uses a stiffer one so
# the dt/2 error stays well above roundoff.
HAMILTONIAN_NORM = 2.0
ORDER_HAMILTONIAN_NORM = 4.0


def shipped_generators() -> List[EntropyGenerator]:
    """Every full-space generator variant the suites exercise."""
    return [
        Quadratic(),
        RenyiHomogeneous(1.5),
        RenyiHomogeneous(2.5),
        RenyiPure(1.5),
        RenyiPure(3.0),
        SmoothF2(ScalarProfile.half_square()),
        SmoothF2(ScalarProfile.power(3.0)),
        Composite((
            CompositePart(RenyiHomogeneous(1.5), 0.4),
            CompositePart(Quadratic(), 0.6),
        )),
    ]


def subsystem_generator(shape: BipartiteShape) -> Composite:
    return Composite((
        CompositePart(RenyiPure(1.5), 0.5, shape, "first"),
        CompositePart(Quadratic(), 0.5, shape, "second"),
    ))


def _row(
    suite: str,
    prop: str,
    deviation: float,
    tolerance: float,
    trials: int,
    comparison: str = "<=",
    mode: str = "assert",
    detail: str = "",
) -> PropertyRow:
    if mode == "report":
        passed = None
    elif comparison == ">":
        passed = bool(deviation > tolerance)
    else:
        passed = bool(deviation <= tolerance)
    return {
        "suite": suite,
        "property": prop,
        "max_deviation": float(deviation),
        "tolerance": float(tolerance),
        "comparison": comparison,
        "mode": mode,
        "passed": passed,
        "trials": int(trials),
        "detail": detail,
    }


def _guarded(suite: str, prop: str, tolerance: float, trials: int, fn: Callable[[], PropertyRow]) -> PropertyRow:
    """Run one property; toolkit errors become a failed row instead of aborting the suite."""
    try:
        return fn()
    except NambuError as exc:
        logger.warning("%s/%s raised %s", suite, prop, exc)
        return _row(suite, prop, math.inf, tolerance, trials, detail=f"{type(exc).__name__}: {exc}")


def _mixed_state(dim: int, stream: SeededStream) -> DensityMatrix:
    return random_density(dim, dim, stream, min_eigenvalue=MIXED_MIN_EIGENVALUE)


def _pure_state(dim: int, stream: SeededStream) -> DensityMatrix:
    return random_density(dim, 1, stream)


def _spec(h, s, rho0, t_final, settings, **kwargs) -> EvolutionSpec:
    return EvolutionSpec(
        hamiltonian=h,
        generator=s,
        rho0=rho0,
        t_final=t_final,
        dt=settings["dt"],
        record_every=settings["record_every"],
        **kwargs,
    )


# ──────────────────────────────────────────────────
# entropy
# ──────────────────────────────────────────────────

SCAN_ALPHAS = (0.5, 1.5, 2.0, 3.0)
UNIFORM_ALPHAS = (0.5, 2.0, 3.0)
MONOTONE_ORDERS = (0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 5.0)
IDENTITY_SAMPLE_CAP = 100


def _random_dist(stream: SeededStream) -> ProbDist:
    return ProbDist(stream.simplex(stream.integers(2, 9)))


def suite_entropy(stream: SeededStream, trials: int, settings: Dict[str, Any], trace=None) -> List[PropertyRow]:
    suite = "entropy"
    rows: List[PropertyRow] = []

    scan = gain_vanishing_scan(trials, SCAN_ALPHAS, seed=stream.spawn().seed, trace=trace)
    for col in scan["columns"]:
        if col["alpha"] == 2.0:
            rows.append(_row(suite, "gain_vanishes(alpha=2)", col["max_abs_gain"], 1e-12, trials))
        else:
            rows.append(_row(
                suite, f"gain_nonzero(alpha={col['alpha']:g})", col["max_abs_gain"], 1e-3, trials,
                comparison=">",
                detail="pathological order" if col["pathological"] else "",
            ))

    worst = max(
        abs(renyi(ProbDist.uniform(n), a) - math.log2(n))
        for n in range(1, 65)
        for a in UNIFORM_ALPHAS
    )
    rows.append(_row(suite, "uniform_renyi=log2(N)", worst, 1e-10, 64 * len(UNIFORM_ALPHAS)))

    n_ident = min(trials, IDENTITY_SAMPLE_CAP)
    sub = stream.spawn()
    worst = 0.0
    for _ in range(n_ident):
        p = _random_dist(sub)
        h = shannon(p)
        worst = max(worst, abs(renyi(p, 1.0 - 1e-4) - h), abs(renyi(p, 1.0 + 1e-4) - h))
    rows.append(_row(suite, "renyi->shannon(alpha=1+-1e-4)", worst, 1e-3, n_ident))

    sub = stream.spawn()
    worst = 0.0
    for _ in range(n_ident):
        p = _random_dist(sub)
        series = [shannon(p) if a == 1.0 else renyi(p, a) for a in MONOTONE_ORDERS]
        worst = max(worst, max(b - a for a, b in zip(series, series[1:])))
    rows.append(_row(suite, "renyi_monotone_in_alpha", max(worst, 0.0), 1e-12, n_ident))

    sub = stream.spawn()
    worst = 0.0
    for _ in range(n_ident):
        p = _random_dist(sub)
        worst = max(worst, daroczy_limit_sweep(p, (1e-4,))[0]["max_gap"])
    rows.append(_row(suite, "daroczy->shannon(alpha=1+-1e-4)", worst, 1e-3, n_ident))

    sub = stream.spawn()
    worst = 0.0
    for _ in range(n_ident):
        p = _random_dist(sub)
        info = -np.log2(p.probs)
        for a in UNIFORM_ALPHAS:
            phi, phi_inv = renyi_phi(a)
            worst = max(worst, abs(kolmogorov_nagumo_mean(p.probs, info, phi, phi_inv) - renyi(p, a)))
    rows.append(_row(suite, "kn_mean_reproduces_renyi", worst, 1e-10, n_ident))
    return rows


# ──────────────────────────────────────────────────
# brackets
# ──────────────────────────────────────────────────

def _random_linear(dim: int, stream: SeededStream, label: str) -> Functional:
    return Functional.linear(random_hermitian(dim, stream, norm=1.0), label=label)


def _gradient_error(s: EntropyGenerator, rho: DensityMatrix) -> float:
    closed = gradient_array(s, rho.data)
    numeric = functional_gradient_fd(lambda a: value_array(s, a), rho).data
    return float(np.linalg.norm(closed - numeric) / np.linalg.norm(numeric))


def suite_brackets(stream: SeededStream, trials: int, settings: Dict[str, Any], trace=None) -> List[PropertyRow]:
    suite = "brackets"
    rows: List[PropertyRow] = []
    shape = BipartiteShape(2, 2)

    def gradients() -> PropertyRow:
        sub = stream.spawn()
        worst, where = 0.0, ""
        for dim in (2, 3, 4):
            variants = shipped_generators() + ([subsystem_generator(shape)] if dim == shape.dim else [])
            for s in variants:
                for _ in range(trials):
                    err = _gradient_error(s, _mixed_state(dim, sub))
                    if err > worst:
                        worst, where = err, f"{describe(s)} dim={dim}"
        return _row(suite, "gradient_closed_form_vs_fd", worst, 1e-6, trials, detail=where)

    def collapse() -> PropertyRow:
        sub = stream.spawn()
        worst = 0.0
        for _ in range(trials):
            rho = _mixed_state(sub.integers(2, 5), sub)
            worst = max(
                worst,
                abs(value_array(RenyiHomogeneous(2.0), rho.data) - value_array(Quadratic(), rho.data)),
                float(np.max(np.abs(gradient_array(RenyiHomogeneous(2.0), rho.data) - rho.data))),
            )
        return _row(suite, "renyi_hom(alpha=2)==quadratic", worst, 1e-12, trials)

    def homogeneity() -> PropertyRow:
        sub = stream.spawn()
        worst = 0.0
        for s in shipped_generators():
            if isinstance(s, SmoothF2):
                continue
            for _ in range(trials):
                rho = _mixed_state(sub.integers(2, 5), sub)
                lam = 0.5 + 1.5 * float(sub.uniform())
                worst = max(worst, check_homogeneity(s, rho, lam))
        return _row(suite, "two_homogeneity", worst, 1e-10, trials)

    def antisymmetry() -> PropertyRow:
        sub = stream.spawn()
        worst = 0.0
        for _ in range(trials):
            dim = sub.integers(2, 5)
            rho = _mixed_state(dim, sub)
            f, g, h = (_random_linear(dim, sub, x) for x in "FGH")
            base = triple_bracket(f, g, h, rho)
            worst = max(
                worst,
                abs(base + triple_bracket(g, f, h, rho)),
                abs(base + triple_bracket(f, h, g, rho)),
                abs(base - triple_bracket(g, h, f, rho)),
            )
        return _row(suite, "triple_bracket_antisymmetry", worst, 1e-12, trials)

    def casimirs() -> PropertyRow:
        sub = stream.spawn()
        worst = 0.0
        for _ in range(trials):
            dim = sub.integers(2, 5)
            rho = _mixed_state(dim, sub)
            g = _random_linear(dim, sub, "G")
            worst = max(
                worst,
                abs(bbmj_bracket(Functional.trace(dim), g, rho)),
                abs(bbmj_bracket(Quadratic(), g, rho)),
            )
        return _row(suite, "bbmj_casimirs(trace,S2)", worst, 1e-12, trials)

    def moment_casimirs() -> PropertyRow:
        sub = stream.spawn()
        worst = 0.0
        for s in shipped_generators():
            for _ in range(trials):
                dim = sub.integers(2, 5)
                rho = _mixed_state(dim, sub)
                g = _random_linear(dim, sub, "G")
                for m in range(1, 6):
                    worst = max(worst, moment_casimir_check(m, g, s, rho))
        return _row(suite, "moment_casimirs(f1..f5)", worst, 1e-10, trials)

    for prop, tol, fn in (
        ("gradient_closed_form_vs_fd", 1e-6, gradients),
        ("renyi_hom(alpha=2)==quadratic", 1e-12, collapse),
        ("two_homogeneity", 1e-10, homogeneity),
        ("triple_bracket_antisymmetry", 1e-12, antisymmetry),
        ("bbmj_casimirs(trace,S2)", 1e-12, casimirs),
        ("moment_casimirs(f1..f5)", 1e-10, moment_casimirs),
    ):
        rows.append(_guarded(suite, prop, tol, trials, fn))
    return rows


# ──────────────────────────────────────────────────
# nosignal
# ──────────────────────────────────────────────────

NOSIGNAL_SHAPES = (BipartiteShape(2, 2), BipartiteShape(2, 3))


def _local_functionals(dim: int, stream: SeededStream) -> List[Functional]:
    """A linear and a quadratic functional of a dim x dim reduced state."""
    a = random_hermitian(dim, stream, norm=1.0).data
    b = random_hermitian(dim, stream, norm=1.0).data

    def quad(x: np.ndarray) -> float:
        return float(np.sum(x * b.T).real) ** 2 + float(np.vdot(x, x).real)

    def quad_grad(x: np.ndarray) -> np.ndarray:
        return 2.0 * float(np.sum(x * b.T).real) * b + 2.0 * x

    return [
        Functional.linear(a, label="linear"),
        Functional(quad, dim, quad_grad, label="quadratic", validate=False),
    ]


def suite_nosignal(stream: SeededStream, trials: int, settings: Dict[str, Any], trace=None) -> List[PropertyRow]:
    suite = "nosignal"

    def check() -> PropertyRow:
        sub = stream.spawn()
        worst, where = 0.0, ""
        for i in range(trials):
            shape = NOSIGNAL_SHAPES[i % len(NOSIGNAL_SHAPES)]
            rho = _mixed_state(shape.dim, sub)
            firsts = _local_functionals(shape.d1, sub)
            seconds = _local_functionals(shape.d2, sub)
            for s in shipped_generators() + [subsystem_generator(shape)]:
                for f in firsts:
                    for g in seconds:
                        value = local_bracket_check(shape, f, g, s, rho)
                        if value > worst:
                            worst = value
                            where = f"{shape.d1}x{shape.d2} {describe(s)} {f.label}/{g.label}"
        return _row(suite, "local_brackets_vanish", worst, 1e-8, trials, detail=where)

    return [_guarded(suite, "local_brackets_vanish", 1e-8, trials, check)]


# ──────────────────────────────────────────────────
# jacobi
# ──────────────────────────────────────────────────

JACOBI_TOLERANCE = 1e-5


def jacobi_generators() -> List[tuple]:
    """(generator, asserted) pairs; only the f2-built brackets are Lie brackets."""
    return [
        (Quadratic(), True),
        (SmoothF2(ScalarProfile.half_square()), True),
        (RenyiHomogeneous(1.5), False),
        (RenyiPure(3.0), False),
    ]


def suite_jacobi(stream: SeededStream, trials: int, settings: Dict[str, Any], trace=None) -> List[PropertyRow]:
    suite = "jacobi"
    rows: List[PropertyRow] = []
    for s, asserted in jacobi_generators():
        prop = f"jacobi_defect({describe(s)})"

        def check(s=s, asserted=asserted, prop=prop) -> PropertyRow:
            sub = stream.spawn()
            worst = 0.0
            for _ in range(trials):
                dim = sub.integers(2, 4)
                rho = _mixed_state(dim, sub)
                f, g, h = (_random_linear(dim, sub, x) for x in "FGH")
                worst = max(worst, abs(jacobi_defect(f, g, h, s, rho)))
            return _row(
                suite, prop, worst, JACOBI_TOLERANCE, trials,
                mode="assert" if asserted else "report",
            )

        rows.append(_guarded(suite, prop, JACOBI_TOLERANCE, trials, check))
    return rows


# ──────────────────────────────────────────────────
# conservation
# ──────────────────────────────────────────────────

PURE_ALPHAS = (1.3, 1.5, 1.8, 2.5)
SPECTRUM_ALPHAS = (1.5, 2.5)
SPEED_ALPHAS = (1.1, 1.5, 3.0)


def suite_conservation(stream: SeededStream, trials: int, settings: Dict[str, Any], trace=None) -> List[PropertyRow]:
    suite = "conservation"
    rows: List[PropertyRow] = []

    def hamiltonian(dim: int, sub: SeededStream, norm: float = HAMILTONIAN_NORM) -> HermitianMatrix:
        return random_hermitian(dim, sub, norm=norm)

    property_trials = settings.get("property_trials", {})

    def budget(key: str) -> int:
        return property_trials.get(key, trials)

    def linear_oracle() -> PropertyRow:
        sub = stream.spawn()
        worst = 0.0
        n = budget("linear_oracle")
        for _ in range(n):
            dim = sub.integers(2, 5)
            spec = _spec(hamiltonian(dim, sub), RenyiHomogeneous(2.0), _mixed_state(dim, sub),
                         settings["linear_t_final"], settings)
            worst = max(worst, oracle_deviation(evolve(spec)))
        return _row(suite, "alpha2_matches_linear_oracle", worst, 1e-8, n)

    def pure_linearity() -> PropertyRow:
        sub = stream.spawn()
        worst, where = 0.0, ""
        n = budget("pure_linearity")
        for alpha in PURE_ALPHAS:
            for _ in range(n):
                dim = sub.integers(2, 5)
                spec = _spec(hamiltonian(dim, sub), RenyiHomogeneous(alpha), _pure_state(dim, sub),
                             settings["nonlinear_t_final"], settings)
                dev = oracle_deviation(evolve(spec))
                if dev > worst:
                    worst, where = dev, f"alpha={alpha:g} dim={dim}"
        return _row(suite, "pure_state_linearity", worst, 1e-7, n, detail=where)

    spectrum_stats: Dict[str, float] = {}

    def spectra() -> PropertyRow:
        sub = stream.spawn()
        drift, min_eig = 0.0, math.inf
        n = budget("eigenvalue_drift")
        for alpha in SPECTRUM_ALPHAS:
            for _ in range(n):
                dim = sub.integers(3, 5)
                spec = _spec(hamiltonian(dim, sub), RenyiHomogeneous(alpha), _mixed_state(dim, sub),
                             settings["mixed_t_final"], settings)
                traj = evolve(spec)
                drift = max(drift, traj.eigenvalue_drift())
                min_eig = min(min_eig, traj.min_eigenvalue())
        spectrum_stats.update(min_eigenvalue=min_eig, trials=n)
        return _row(suite, "eigenvalue_drift", drift, 1e-6, n)

    def positivity() -> PropertyRow:
        neg = max(0.0, -spectrum_stats.get("min_eigenvalue", -math.inf))
        return _row(suite, "positivity(-min_eigenvalue)", neg, 1e-8, int(spectrum_stats.get("trials", trials)),
                    detail="from the eigenvalue_drift runs")

    invariant_stats: Dict[str, float] = {}

    def moments() -> PropertyRow:
        sub = stream.spawn()
        worst, where = 0.0, ""
        s_drift = energy_drift = 0.0
        variants = shipped_generators()
        # Specs cycle through the variants; every variant gets at least one.
        n = max(budget("moment_drift"), len(variants))
        for i in range(n):
            s = variants[i % len(variants)]
            dim = sub.integers(2, 5)
            spec = _spec(hamiltonian(dim, sub), s, _mixed_state(dim, sub),
                         settings["mixed_t_final"], settings)
            traj = evolve(spec)
            drift = max(traj.moment_drift())
            if drift > worst:
                worst, where = drift, describe(s)
            s_drift = max(s_drift, traj.generator_drift())
            energy_drift = max(energy_drift, traj.energy_drift())
        invariant_stats.update(generator=s_drift, energy=energy_drift, trials=n)
        return _row(suite, "moment_drift(f1..f5)", worst, 1e-7, n, detail=where)

    def generator_value() -> PropertyRow:
        return _row(suite, "generator_value_drift", invariant_stats.get("generator", math.inf), 1e-7,
                    int(invariant_stats.get("trials", trials)),
                    detail="from the moment_drift runs")

    def energy() -> PropertyRow:
        return _row(suite, "energy_drift", invariant_stats.get("energy", math.inf), 1e-8,
                    int(invariant_stats.get("trials", trials)),
                    detail="from the moment_drift runs")

    def rescaling() -> PropertyRow:
        sub = stream.spawn()
        worst = 0.0
        g = SmoothF2(ScalarProfile.half_square())
        n = budget("time_rescaling")
        for _ in range(n):
            dim = sub.integers(2, 5)
            worst = max(worst, time_rescaling_check(
                g, hamiltonian(dim, sub), _mixed_state(dim, sub),
                settings["nonlinear_t_final"], settings["dt"], settings["record_every"],
            ))
        return _row(suite, "smooth_f2_time_rescaling", worst, 1e-6, n)

    def speed() -> PropertyRow:
        sub = stream.spawn()
        worst, where = 0.0, ""
        for alpha in SPEED_ALPHAS:
            s = RenyiPure(alpha)
            for _ in range(budget("speed_factor")):
                dim = sub.integers(2, 5)
                spec = _spec(hamiltonian(dim, sub), s, _pure_state(dim, sub),
                             settings["nonlinear_t_final"], settings)
                dev = oracle_deviation(evolve(spec), speed_factor(s))
                if dev > worst:
                    worst, where = dev, f"alpha={alpha:g}"
        return _row(suite, "renyi_pure_speed_factor", worst, 1e-6, budget("speed_factor"), detail=where)

    def subentropies() -> PropertyRow:
        sub = stream.spawn()
        shape = BipartiteShape(2, 2)
        coupling = np.kron(PAULI["Z"], PAULI["Z"])
        worst = 0.0
        n = budget("subentropy")
        for _ in range(n):
            h = hamiltonian(4, sub).data + coupling
            spec = _spec(HermitianMatrix(h), subsystem_generator(shape), _mixed_state(4, sub),
                         settings["nonlinear_t_final"], settings)
            worst = max(worst, max(subentropy_conservation_check(spec, shape)))
        return _row(suite, "subentropy_drift(interacting)", worst, 1e-6, n)

    def isolation() -> PropertyRow:
        sub = stream.spawn()
        shape = BipartiteShape(2, 2)
        eye = np.eye(2)
        worst = 0.0
        n = budget("isolation")
        for _ in range(n):
            h1, h2 = hamiltonian(2, sub).data, hamiltonian(2, sub).data
            h = np.kron(h1, eye) + np.kron(eye, h2)
            spec = _spec(HermitianMatrix(h), subsystem_generator(shape), _mixed_state(4, sub),
                         settings["nonlinear_t_final"], settings)
            rows_ = isolation_diagnostics(evolve(spec))
            worst = max(worst, max(r["max_relative_drift"] for r in rows_))
        return _row(suite, "isolation_ratio_drift(noninteracting)", worst, 1e-7, n)

    def order() -> PropertyRow:
        sub = stream.spawn()
        dim = 3
        spec = _spec(hamiltonian(dim, sub, ORDER_HAMILTONIAN_NORM), RenyiHomogeneous(2.0),
                     _mixed_state(dim, sub), settings["linear_t_final"], settings)
        result = convergence_order(spec)
        return _row(
            suite, "integrator_order(dt/2 error ratio)", result["ratio"], 12.0, 1,
            comparison=">",
            detail=(
                f"deviation {result['deviation']:.3e} -> {result['half_dt_deviation']:.3e}, "
                f"drift {result['drift']:.1e}"
            ),
        )

    for prop, tol, fn in (
        ("alpha2_matches_linear_oracle", 1e-8, linear_oracle),
        ("pure_state_linearity", 1e-7, pure_linearity),
        ("eigenvalue_drift", 1e-6, spectra),
        ("positivity(-min_eigenvalue)", 1e-8, positivity),
        ("moment_drift(f1..f5)", 1e-7, moments),
        ("generator_value_drift", 1e-7, generator_value),
        ("energy_drift", 1e-8, energy),
        ("smooth_f2_time_rescaling", 1e-6, rescaling),
        ("renyi_pure_speed_factor", 1e-6, speed),
        ("subentropy_drift(interacting)", 1e-6, subentropies),
        ("isolation_ratio_drift(noninteracting)", 1e-7, isolation),
        ("integrator_order(dt/2 error ratio)", 12.0, order),
    ):
        rows.append(_guarded(suite, prop, tol, trials, fn))
    return rows


# ──────────────────────────────────────────────────
# Registry and driver
# ──────────────────────────────────────────────────

SUITES: Dict[str, Callable[..., List[PropertyRow]]] = {
    "entropy": suite_entropy,
    "brackets": suite_brackets,
    "nosignal": suite_nosignal,
    "jacobi": suite_jacobi,
    "conservation": suite_conservation,
}


def expand_suites(name: str) -> List[str]:
    if name == "all":
        return list(SUITE_NAMES)
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; expected one of {', '.join(SUITE_NAMES)} or all")
    return [name]


def _emit_verdict(trace: Any, row: PropertyRow, seed: int) -> None:
    verdict = "report" if row["passed"] is None else ("PASS" if row["passed"] else "FAIL")
    emit_deterministic_span(
        trace,
        tool=f"suites.{row['suite']}",
        decision="property_verdict",
        value=row["property"],
        human_summary=(
            f"{row['property']}: {row['max_deviation']:.3e} {row['comparison']} "
            f"{row['tolerance']:.1e} [{verdict}]"
        ),
        agent_context=f"seed={seed} trials={row['trials']} {row['detail']}".strip(),
        stage="VERIFY",
        outputs={"max_deviation": row["max_deviation"], "tolerance": row["tolerance"]},
        passed=row["passed"],
    )


def run_suite(
    name: str,
    seed: Optional[int] = None,
    trials: Optional[int] = None,
    trace: Any = None,
    tolerances: Optional[Dict[str, Any]] = None,
    profile: Optional[str] = None,
) -> List[PropertyRow]:
    """Run one suite with the seeded stream. `seed`/`trials` default to tolerances.yaml.

    `profile` selects a verify.profiles block; an explicit `trials` overrides
    its per-property counts too.
    """
    data = tolerances or load_tolerances()
    settings = suite_settings(name, data, profile)
    if trials is not None:
        settings.pop("property_trials", None)
    seed = resolve_seed(seed if seed is not None else int(data["verify"].get("seed", 1)))
    n = int(trials) if trials is not None else settings.get("trials", 1)
    if n < 1:
        raise ValueError(f"trials must be >= 1, got {n}")
    logger.info("suite %s: seed=%d trials=%d profile=%s", name, seed, n, profile or "default")
    rows = SUITES[name](SeededStream(seed), n, settings, trace=trace)
    for row in rows:
        _emit_verdict(trace, row, seed)
    return rows


def run_suites(
    names: Sequence[str],
    seed: Optional[int] = None,
    trials: Optional[int] = None,
    trace: Any = None,
    profile: Optional[str] = None,
) -> List[PropertyRow]:
    data = load_tolerances()
    rows: List[PropertyRow] = []
    for name in names:
        rows.extend(run_suite(name, seed=seed, trials=trials, trace=trace, tolerances=data, profile=profile))
    return rows


def all_passed(rows: Sequence[PropertyRow]) -> bool:
    return all(r["passed"] is not False for r in rows)
