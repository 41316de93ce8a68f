"""Portable seeded random generator used by the synthetic-data module.

SplitMix64 (Steele/Lea/Flood mixing constants) is the single random source
for data generation, so that two runs -- or two implementations in different
languages -- produce bit-identical graphs from the same seed.  The normative
test vectors live in the README and in tests/test_synthgen.py.
"""

from __future__ import annotations

import math

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def mix64(z: int) -> int:
    """Finalizing mixer of SplitMix64 (input and output are u64)."""
    z &= _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def derive_seed(seed: int, *salts: int) -> int:
    """Derive an independent child seed from (seed, salts...).

    Used to partition the seed space across egos so generation stays
    deterministic under any parallel schedule.
    """
    s = seed & _MASK64
    for t in salts:
        s = mix64((s + _GOLDEN * ((t & _MASK64) + 1)) & _MASK64)
    return s


class SplitMix64:
    """Sequential SplitMix64 stream."""

    __slots__ = ("_state", "_gauss_cache")

    def __init__(self, seed: int):
        self._state = seed & _MASK64
        self._gauss_cache: float | None = None

    def next_u64(self) -> int:
        self._state = (self._state + _GOLDEN) & _MASK64
        return mix64(self._state)

    def random(self) -> float:
        """Uniform float in [0, 1) with 53 bits of precision."""
        return (self.next_u64() >> 11) * 2.0 ** -53

    def randint(self, n: int) -> int:
        """Uniform integer in [0, n) via the multiply-shift reduction.

        Deterministic and portable; the tiny modulo bias of multiply-shift
        is irrelevant for data generation and avoids rejection loops.
        """
        if n <= 0:
            raise ValueError("randint bound must be positive")
        return (self.next_u64() * n) >> 64

    def gauss(self) -> float:
        """Standard normal draw (Box-Muller, one cached partner)."""
        if self._gauss_cache is not None:
            z = self._gauss_cache
            self._gauss_cache = None
            return z
        # u1 in (0, 1] so the log is finite
        u1 = ((self.next_u64() >> 11) + 1) * 2.0 ** -53
        u2 = (self.next_u64() >> 11) * 2.0 ** -53
        r = math.sqrt(-2.0 * math.log(u1))
        theta = 2.0 * math.pi * u2
        self._gauss_cache = r * math.sin(theta)
        return r * math.cos(theta)
