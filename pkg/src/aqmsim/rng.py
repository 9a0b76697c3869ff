"""Deterministic uniform random streams (SplitMix64).

Both simulation backends implement exactly this generator, so a seed fully
determines every simulated run regardless of backend.
"""
from __future__ import annotations

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_INV_2_53 = 1.0 / 9007199254740992.0  # 2**-53


class SplitMix64:
    """64-bit SplitMix generator; identical seeds give identical sequences."""

    __slots__ = ("_state",)

    def __init__(self, seed: int):
        if seed < 0 or seed > _MASK64:
            raise ValueError("seed must fit in an unsigned 64-bit integer")
        self._state = seed

    def next_u64(self) -> int:
        self._state = (self._state + _GAMMA) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * _MIX1) & _MASK64
        z = ((z ^ (z >> 27)) * _MIX2) & _MASK64
        return z ^ (z >> 31)

    def uniform(self) -> float:
        """Uniform double in [0, 1) built from the top 53 bits."""
        return (self.next_u64() >> 11) * _INV_2_53


def derive_streams(seed: int) -> tuple[int, int]:
    """Split one run seed into independent (traffic, decision) stream seeds.

    Traffic draws (arrival/departure events) and drop-decision draws come from
    separate streams so different policies can be compared under a common
    traffic realization.
    """
    root = SplitMix64(seed)
    return root.next_u64(), root.next_u64()
