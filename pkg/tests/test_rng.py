"""Tests for core/rng.py: the pinned seeded stream."""

import numpy as np
import pytest

from core.rng import MASK64, SEED_ENV_VAR, SeededStream, resolve_seed, splitmix64


class TestSplitmix64:
    def test_reference_output_for_zero_state(self):
        state, out = splitmix64(0)
        assert state == 0x9E3779B97F4A7C15
        assert out == 0xE220A8397B1DCDAF

    def test_outputs_stay_in_64_bits(self):
        state = 12345
        for _ in range(10):
            state, out = splitmix64(state)
            assert 0 <= out <= MASK64


class TestSeededStream:
    def test_same_seed_same_sequence(self):
        a, b = SeededStream(42), SeededStream(42)
        assert [a.next_u64() for _ in range(8)] == [b.next_u64() for _ in range(8)]

    def test_different_seeds_differ(self):
        assert SeededStream(1).next_u64() != SeededStream(2).next_u64()

    def test_uniform_range(self):
        u = SeededStream(3).uniform(1000)
        assert u.shape == (1000,)
        assert np.all(u >= 0.0) and np.all(u < 1.0)
        assert 0.4 < u.mean() < 0.6

    def test_normal_moments(self):
        z = SeededStream(4).normal(4000)
        assert abs(z.mean()) < 0.1
        assert z.std() == pytest.approx(1.0, abs=0.1)

    def test_complex_normal_shape(self):
        z = SeededStream(5).complex_normal((3, 4))
        assert z.shape == (3, 4)
        assert np.iscomplexobj(z)

    @pytest.mark.parametrize("n", [1, 2, 8])
    def test_simplex_is_strictly_positive_distribution(self, n):
        p = SeededStream(6).simplex(n)
        assert p.sum() == pytest.approx(1.0, abs=1e-12)
        assert np.all(p > 0.0)

    def test_integers_range(self):
        s = SeededStream(7)
        values = {s.integers(2, 5) for _ in range(200)}
        assert values == {2, 3, 4}

    def test_integers_empty_range_raises(self):
        with pytest.raises(ValueError):
            SeededStream(7).integers(3, 3)

    def test_spawn_is_reproducible_and_independent(self):
        a, b = SeededStream(8), SeededStream(8)
        child_a, child_b = a.spawn(), b.spawn()
        assert child_a.seed == child_b.seed
        assert child_a.next_u64() == child_b.next_u64()
        assert a.next_u64() == b.next_u64()


class TestResolveSeed:
    def test_no_override(self):
        assert resolve_seed(5) == 5

    def test_env_override(self, monkeypatch):
        monkeypatch.setenv(SEED_ENV_VAR, "99")
        assert resolve_seed(5) == 99

    def test_blank_env_is_ignored(self, monkeypatch):
        monkeypatch.setenv(SEED_ENV_VAR, "  ")
        assert resolve_seed(5) == 5
