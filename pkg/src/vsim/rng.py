"""Deterministic PRNG for procedural content (floaters, patches).

The generator is SplitMix64, pinned so that independent implementations
(e.g. a viewer re-rendering blob overlays client-side) can reproduce the
exact same draw sequence from a seed. Algorithm, version and test vectors:

    vsim-splitmix64, version 1

    state: 64-bit unsigned, initialised to the seed
    next_u64():
        state = (state + 0x9E3779B97F4A7C15) mod 2^64
        z = state
        z = (z XOR (z >> 30)) * 0xBF58476D1CE4E5B9 mod 2^64
        z = (z XOR (z >> 27)) * 0x94D049BB133111EB mod 2^64
        return z XOR (z >> 31)
    next_float():
        return (next_u64() >> 11) * 2^-53   # double in [0, 1)

    seed 0, first three u64:
        0xE220A8397B1DCDAF, 0x6E789E6AA1B965F4, 0x06C45D188009454F
    seed 42, first three u64:
        0xBDD732262FEB6E95, 0x28EFE333B266F103, 0x47526757130F9F52
    seed 42, first three floats:
        0.7415648787718233, 0.1599103928769201, 0.27860113025513866

The same vectors are machine-readable in fixtures/rng_vectors.json so
other implementations can test against them directly.
"""

from __future__ import annotations

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB

ALGORITHM = "vsim-splitmix64"
VERSION = 1


class SplitMix64:
    """SplitMix64 generator with the uniform helpers the generators need."""

    __slots__ = ("_state",)

    def __init__(self, seed: int):
        self._state = int(seed) & _MASK

    def next_u64(self) -> int:
        self._state = (self._state + _GAMMA) & _MASK
        z = self._state
        z = ((z ^ (z >> 30)) * _MIX1) & _MASK
        z = ((z ^ (z >> 27)) * _MIX2) & _MASK
        return z ^ (z >> 31)

    def next_float(self) -> float:
        """Uniform double in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * (2.0 ** -53)

    def uniform(self, low: float, high: float) -> float:
        """Uniform double in [low, high)."""
        if not low < high:
            raise ValueError(f"need low < high, got [{low}, {high})")
        return low + (high - low) * self.next_float()
