"""Seeded random stream shared by fixtures, scans and verification suites.

All randomness in the toolkit comes from one pinned algorithm: xoshiro256**
whose 256-bit state is filled from the seed by splitmix64. Pinning the
algorithm (rather than relying on numpy's default bit generator) keeps
fixture matrices identical across numpy releases.

Usage:
    from core.rng import SeededStream
    stream = SeededStream(7)
    stream.uniform(3)        # ndarray of 3 doubles in [0, 1)
    stream.simplex(4)        # flat-simplex probability vector
"""

from __future__ import annotations

import math
import os
from typing import List, Optional, Union

import numpy as np

MASK64 = (1 << 64) - 1

# Environment variable that overrides every configured seed.
SEED_ENV_VAR = "NAMBUQ_SEED"


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & MASK64


def splitmix64(state: int) -> tuple[int, int]:
    """Advance a splitmix64 state. Returns (new_state, output)."""
    state = (state + 0x9E3779B97F4A7C15) & MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return state, z ^ (z >> 31)


def resolve_seed(seed: Optional[int]) -> Optional[int]:
    """Apply the NAMBUQ_SEED override, if set, to a configured seed."""
    override = os.environ.get(SEED_ENV_VAR)
    if override is not None and override.strip():
        return int(override.strip())
    return seed


class SeededStream:
    """xoshiro256** generator seeded through splitmix64."""

    def __init__(self, seed: int):
        self.seed = int(seed)
        sm = self.seed & MASK64
        state: List[int] = []
        for _ in range(4):
            sm, out = splitmix64(sm)
            state.append(out)
        self._s = state

    def next_u64(self) -> int:
        s0, s1, s2, s3 = self._s
        result = (_rotl((s1 * 5) & MASK64, 7) * 9) & MASK64
        t = (s1 << 17) & MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = _rotl(s3, 45)
        self._s = [s0, s1, s2, s3]
        return result

    def _double(self) -> float:
        return (self.next_u64() >> 11) * (1.0 / 9007199254740992.0)

    def _open_double(self) -> float:
        # Strictly inside (0, 1); safe for logarithms.
        return ((self.next_u64() >> 11) + 0.5) * (1.0 / 9007199254740992.0)

    def uniform(self, size: Optional[int] = None) -> Union[float, np.ndarray]:
        """Doubles in [0, 1)."""
        if size is None:
            return self._double()
        return np.array([self._double() for _ in range(size)])

    def normal(self, size: Optional[int] = None) -> Union[float, np.ndarray]:
        """Standard normal deviates (Box-Muller, both branches consumed)."""
        count = 1 if size is None else size
        out: List[float] = []
        while len(out) < count:
            u1 = self._open_double()
            u2 = self._double()
            radius = math.sqrt(-2.0 * math.log(u1))
            out.append(radius * math.cos(2.0 * math.pi * u2))
            out.append(radius * math.sin(2.0 * math.pi * u2))
        if size is None:
            return out[0]
        return np.array(out[:count])

    def complex_normal(self, shape: tuple[int, int]) -> np.ndarray:
        """Complex Ginibre entries with unit variance per component."""
        n = shape[0] * shape[1]
        re = self.normal(n)
        im = self.normal(n)
        return (re + 1j * im).reshape(shape)

    def integers(self, low: int, high: int) -> int:
        """Integer in [low, high)."""
        if high <= low:
            raise ValueError(f"empty integer range [{low}, {high})")
        return low + self.next_u64() % (high - low)

    def simplex(self, n: int) -> np.ndarray:
        """Flat-simplex sample: normalized exponentials of uniform deviates."""
        e = np.array([-math.log(self._open_double()) for _ in range(n)])
        return e / e.sum()

    def spawn(self) -> "SeededStream":
        """Child stream whose seed is drawn from this one."""
        return SeededStream(self.next_u64())
