"""Deterministic point sampling.

SplitMix64 is used for every sampled coordinate so that reports are
byte-identical across runs and platforms for a fixed seed.  numpy's
generators are deliberately not used here: their stream identity is not
part of any stability contract we control.
"""

from __future__ import annotations

import math

_MASK = (1 << 64) - 1


class SplitMix64:
    """64-bit splitmix generator (Steele, Lea & Flood counter-mix)."""

    __slots__ = ("_state",)

    def __init__(self, seed: int) -> None:
        self._state = seed & _MASK

    def next_u64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & _MASK
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return (z ^ (z >> 31)) & _MASK

    def uniform(self, lo: float = 0.0, hi: float = 1.0) -> float:
        u = self.next_u64() >> 11  # 53 significant bits
        return lo + (hi - lo) * (u * (1.0 / (1 << 53)))

    def normal(self) -> float:
        # Box-Muller; u1 kept away from 0 so log stays finite.
        u1 = (self.next_u64() >> 11) * (1.0 / (1 << 53))
        u2 = (self.next_u64() >> 11) * (1.0 / (1 << 53))
        u1 = max(u1, 1e-300)
        return math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)

    def point_in_box(self, box: list[tuple[float, float]]) -> tuple[float, ...]:
        return tuple(self.uniform(lo, hi) for lo, hi in box)

    def unit_vector(self, n: int) -> tuple[float, ...]:
        while True:
            v = [self.normal() for _ in range(n)]
            norm = math.sqrt(sum(x * x for x in v))
            if norm > 1e-6:
                return tuple(x / norm for x in v)
