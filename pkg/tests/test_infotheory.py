"""Tests for core/infotheory.py: classical entropies and information gain."""

import math
import warnings

import numpy as np
import pytest

from core.errors import DomainError, PathologicalOrderWarning
from core.infotheory import (
    BITS,
    NATS,
    ConditionalUpdate,
    ProbDist,
    daroczy,
    daroczy_limit_sweep,
    decrease_of_uncertainty,
    gain_vanishing_scan,
    hartley,
    info_gain,
    info_loss,
    information_content,
    kolmogorov_nagumo_mean,
    linear_entropy_i2,
    quantum_renyi,
    renyi,
    renyi_phi,
    renyi_star,
    shannon,
)
from core.matrixcore import maximally_mixed
from core.rng import SeededStream
from trace.collector import RunTrace


def dist(*probs):
    return ProbDist(np.array(probs, dtype=float))


class TestProbDist:
    def test_stores_entries_as_given(self):
        p = dist(0.25, 0.75)
        assert list(p.probs) == [0.25, 0.75]

    def test_negative_entry_rejected(self):
        with pytest.raises(DomainError, match="negative"):
            dist(-0.1, 1.1)

    def test_bad_sum_rejected(self):
        with pytest.raises(DomainError, match="sum"):
            dist(0.5, 0.6)

    def test_incomplete_mode_allows_short_sum(self):
        p = ProbDist(np.array([0.2, 0.3]), incomplete=True)
        assert p.probs.sum() == pytest.approx(0.5)

    def test_incomplete_mode_still_caps_at_one(self):
        with pytest.raises(DomainError):
            ProbDist(np.array([0.7, 0.7]), incomplete=True)

    def test_from_string(self):
        assert list(ProbDist.from_string("0.5, 0.25,0.25").probs) == [0.5, 0.25, 0.25]

    def test_from_string_garbage(self):
        with pytest.raises(DomainError):
            ProbDist.from_string("0.5,abc")

    def test_entries_are_read_only(self):
        p = dist(0.5, 0.5)
        with pytest.raises(ValueError):
            p.probs[0] = 1.0


class TestConditionalUpdate:
    def test_length_mismatch(self):
        with pytest.raises(DomainError):
            ConditionalUpdate(dist(0.5, 0.5), dist(1.0 / 3, 1.0 / 3, 1.0 / 3))

    def test_posterior_outside_prior_support(self):
        with pytest.raises(DomainError):
            ConditionalUpdate(dist(1.0, 0.0), dist(0.5, 0.5))


class TestHartleyAndEvents:
    @pytest.mark.parametrize("n,base,expected", [(8, 2, 3.0), (1, 2, 0.0), (10, 10, 1.0)])
    def test_hartley(self, n, base, expected):
        assert hartley(n, base) == pytest.approx(expected, abs=1e-15)

    def test_hartley_zero_rejected(self):
        with pytest.raises(DomainError):
            hartley(0)

    def test_bad_base_rejected(self):
        with pytest.raises(DomainError):
            hartley(4, 1.0)

    def test_information_content(self):
        assert information_content(0.125) == pytest.approx(3.0)

    def test_decrease_of_uncertainty(self):
        assert decrease_of_uncertainty(0.25, 0.5) == pytest.approx(-1.0)


class TestShannon:
    @pytest.mark.parametrize("probs,expected", [
        ((0.5, 0.5), 1.0),
        ((0.5, 0.25, 0.25), 1.5),
        ((1.0, 0.0), 0.0),
    ])
    def test_examples(self, probs, expected):
        assert shannon(dist(*probs)) == pytest.approx(expected, abs=1e-15)

    def test_nats(self):
        assert shannon(dist(0.5, 0.5), NATS) == pytest.approx(math.log(2.0))


class TestRenyi:
    def test_uniform_reduces_to_hartley(self):
        assert renyi(ProbDist.uniform(4), 0.5) == pytest.approx(2.0, abs=1e-12)

    def test_fair_coin(self):
        assert renyi(dist(0.5, 0.5), 2.0) == pytest.approx(1.0)

    def test_skewed_coin(self):
        assert renyi(dist(0.75, 0.25), 2.0) == pytest.approx(0.678072, abs=1e-6)

    def test_alpha_one_points_to_shannon(self):
        with pytest.raises(DomainError, match="shannon"):
            renyi(dist(0.5, 0.5), 1.0)

    def test_negative_alpha_rejected(self):
        with pytest.raises(DomainError):
            renyi(dist(0.5, 0.5), -0.5)

    def test_alpha_zero_counts_support(self):
        assert renyi(dist(0.5, 0.5, 0.0, 0.0), 0.0) == pytest.approx(1.0)

    @pytest.mark.parametrize("alpha", [0.5, 2.0, 3.0])
    def test_uniform_all_sizes(self, alpha):
        for n in range(1, 65):
            assert abs(renyi(ProbDist.uniform(n), alpha) - math.log2(n)) <= 1e-10

    @pytest.mark.parametrize("eps", [1e-3, 1e-4, 1e-5])
    def test_shannon_limit(self, eps):
        p = dist(0.6, 0.3, 0.1)
        h = shannon(p)
        assert abs(renyi(p, 1.0 - eps) - h) < 10 * eps
        assert abs(renyi(p, 1.0 + eps) - h) < 10 * eps

    def test_shannon_limit_is_first_order(self):
        p = dist(0.6, 0.3, 0.1)
        h = shannon(p)
        e1 = abs(renyi(p, 1.0 + 1e-3) - h)
        e2 = abs(renyi(p, 1.0 + 1e-4) - h)
        assert e1 / e2 == pytest.approx(10.0, rel=0.05)

    def test_monotone_decreasing_in_alpha(self):
        stream = SeededStream(11)
        alphas = [0.25, 0.5, 0.75, 1.5, 2.0, 3.0, 4.0]
        for _ in range(20):
            p = ProbDist(stream.simplex(5))
            values = [renyi(p, a) for a in alphas]
            assert all(a >= b - 1e-12 for a, b in zip(values, values[1:]))

    def test_base_change(self):
        p = dist(0.6, 0.3, 0.1)
        assert renyi(p, 2.0, 2.0) * math.log(2.0) == pytest.approx(renyi(p, 2.0, NATS))


class TestRenyiStarAndDaroczy:
    def test_renyi_star_uniform(self):
        assert renyi_star(ProbDist.uniform(5), 0.5) == pytest.approx(5.0)

    def test_renyi_star_coin(self):
        assert renyi_star(dist(0.5, 0.5), 2.0) == pytest.approx(2.0)

    def test_renyi_star_certain(self):
        assert renyi_star(dist(1.0, 0.0), 0.5) == pytest.approx(1.0)

    def test_renyi_star_is_base_power(self):
        p = dist(0.6, 0.3, 0.1)
        assert renyi_star(p, 1.5) == pytest.approx(2.0 ** renyi(p, 1.5, BITS))

    def test_daroczy_examples(self):
        assert daroczy(dist(0.5, 0.5), 2.0) == pytest.approx(1.0)
        assert daroczy(dist(1.0, 0.0), 2.0) == pytest.approx(0.0)

    def test_daroczy_alpha_one_rejected(self):
        with pytest.raises(DomainError):
            daroczy(dist(0.5, 0.5), 1.0)

    def test_daroczy_limit_sweep_approaches_shannon(self):
        rows = daroczy_limit_sweep(dist(0.6, 0.3, 0.1))
        gaps = [r["max_gap"] for r in rows]
        assert gaps == sorted(gaps, reverse=True)
        assert gaps[-1] < 1e-3


class TestKolmogorovNagumo:
    @pytest.mark.parametrize("alpha", [0.5, 2.0, 3.0])
    def test_exponential_mean_is_renyi(self, alpha):
        p = dist(0.5, 0.3, 0.2)
        phi, phi_inv = renyi_phi(alpha)
        info = -np.log2(p.probs)
        assert kolmogorov_nagumo_mean(p.probs, info, phi, phi_inv) == pytest.approx(renyi(p, alpha), abs=1e-12)

    def test_shape_mismatch(self):
        phi, phi_inv = renyi_phi(2.0)
        with pytest.raises(DomainError):
            kolmogorov_nagumo_mean([0.5, 0.5], [1.0], phi, phi_inv)

    def test_phi_degenerate_at_one(self):
        with pytest.raises(DomainError):
            renyi_phi(1.0)


class TestGainAndLoss:
    def test_gain_vanishes_at_two(self):
        u = ConditionalUpdate(dist(0.2, 0.3, 0.5), dist(0.6, 0.1, 0.3))
        assert abs(info_gain(u, 2.0)) <= 1e-14

    @pytest.mark.parametrize("alpha", [0.5, 1.0, 1.5, 2.0])
    def test_no_update_no_gain(self, alpha):
        p = dist(0.2, 0.3, 0.5)
        u = ConditionalUpdate(p, p)
        assert info_gain(u, alpha) == pytest.approx(0.0, abs=1e-12)
        assert info_loss(u, alpha) == pytest.approx(0.0, abs=1e-12)

    def test_shannon_gain_example(self):
        u = ConditionalUpdate(dist(0.5, 0.5), dist(0.75, 0.25))
        assert info_gain(u, 1.0) == pytest.approx(-0.188722, abs=1e-6)

    def test_loss_example(self):
        u = ConditionalUpdate(dist(0.5, 0.5), dist(1.0, 0.0))
        assert info_loss(u, 2.0) == pytest.approx(1.0, abs=1e-12)

    def test_shannon_duality(self):
        stream = SeededStream(3)
        for _ in range(20):
            u = ConditionalUpdate(ProbDist(stream.simplex(4)), ProbDist(stream.simplex(4)))
            assert info_gain(u, 1.0) == pytest.approx(-info_loss(u, 1.0), abs=1e-14)

    def test_pathological_order_warns(self):
        u = ConditionalUpdate(dist(0.5, 0.5), dist(0.75, 0.25))
        with pytest.warns(PathologicalOrderWarning):
            info_gain(u, 3.0)

    def test_no_warning_at_two(self):
        u = ConditionalUpdate(dist(0.5, 0.5), dist(0.75, 0.25))
        with warnings.catch_warnings():
            warnings.simplefilter("error", PathologicalOrderWarning)
            info_gain(u, 2.0)

    def test_posterior_zero_below_one_diverges(self):
        u = ConditionalUpdate(dist(0.5, 0.5), dist(1.0, 0.0))
        assert info_gain(u, 0.5) == math.inf


class TestGainVanishingScan:
    def test_only_two_vanishes(self):
        report = gain_vanishing_scan(100, [0.5, 1.5, 2.0, 3.0], seed=7)
        cols = {c["alpha"]: c for c in report["columns"]}
        assert cols[2.0]["max_abs_gain"] <= 1e-12
        assert cols[2.0]["vanishes"]
        for a in (0.5, 1.5, 3.0):
            assert cols[a]["max_abs_gain"] > 1e-3
            assert not cols[a]["vanishes"]
        assert cols[3.0]["pathological"]
        assert report["error"] is None

    def test_deterministic(self):
        a = gain_vanishing_scan(50, [1.5], seed=7)
        b = gain_vanishing_scan(50, [1.5], seed=7)
        assert a == b

    def test_zero_trials_rejected(self):
        with pytest.raises(DomainError):
            gain_vanishing_scan(0, [2.0], seed=7)

    def test_no_warnings_escape(self):
        with warnings.catch_warnings():
            warnings.simplefilter("error", PathologicalOrderWarning)
            gain_vanishing_scan(10, [3.0], seed=7)

    def test_emits_span(self):
        trace = RunTrace(command="test")
        gain_vanishing_scan(10, [2.0], seed=7, trace=trace)
        spans = trace.spans_for_stage("ENTROPY")
        assert len(spans) == 1
        assert spans[0]["decision"] == "gain_scan"
        assert spans[0]["value"] == "2"


class TestQuantumSpectra:
    def test_maximally_mixed_renyi(self):
        assert quantum_renyi(maximally_mixed(4), 2.0) == pytest.approx(2.0)

    def test_quantum_shannon_at_one(self):
        assert quantum_renyi(maximally_mixed(2), 1.0) == pytest.approx(1.0)

    def test_linear_entropy_matches_renyi_two_in_nats(self, mixed_qutrit):
        assert linear_entropy_i2(mixed_qutrit) == pytest.approx(quantum_renyi(mixed_qutrit, 2.0, NATS))

    def test_linear_entropy_pure_is_zero(self, plus_state):
        assert linear_entropy_i2(plus_state) == pytest.approx(0.0, abs=1e-12)
