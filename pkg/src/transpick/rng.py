"""Fully specified 64-bit PRNG so every seeded choice is reproducible.

splitmix64 (Steele et al., "Fast splittable pseudorandom number
generators") advances a 64-bit state by the golden-gamma constant and
mixes it through two xor-shift-multiply rounds.  The generator is a
dozen lines, has no platform-dependent behavior, and can be re-derived
in any language, which is what corpus splits, k-means seeding, and the
random baseline need for cross-run determinism.
"""
from __future__ import annotations

MASK64 = 0xFFFFFFFFFFFFFFFF
_GAMMA = 0x9E3779B97F4A7C15

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3


def fnv1a64(text: str) -> int:
    """FNV-1a 64-bit hash of the UTF-8 bytes; stable across processes."""
    h = _FNV_OFFSET
    for byte in text.encode("utf-8"):
        h = ((h ^ byte) * _FNV_PRIME) & MASK64
    return h


class SplitMix64:
    """Deterministic stream of 64-bit words from an integer seed."""

    def __init__(self, seed: int):
        self._state = seed & MASK64

    def next_u64(self) -> int:
        self._state = (self._state + _GAMMA) & MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def random(self) -> float:
        """Uniform float in [0, 1) with 53 bits of precision."""
        return (self.next_u64() >> 11) * (2.0**-53)

    def randrange(self, n: int) -> int:
        """Uniform integer in [0, n) by rejection sampling (unbiased)."""
        if n <= 0:
            raise ValueError("randrange needs n >= 1")
        limit = (MASK64 + 1) - ((MASK64 + 1) % n)
        while True:
            u = self.next_u64()
            if u < limit:
                return u % n

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates shuffle."""
        for i in range(len(items) - 1, 0, -1):
            j = self.randrange(i + 1)
            items[i], items[j] = items[j], items[i]

    def weighted_index(self, weights) -> int:
        """Index drawn proportionally to non-negative weights.

        Falls back to a uniform draw when all weights are zero.
        """
        total = float(sum(weights))
        if total <= 0.0:
            return self.randrange(len(weights))
        r = self.random() * total
        acc = 0.0
        for i, w in enumerate(weights):
            acc += float(w)
            if r < acc:
                return i
        return len(weights) - 1


def derive_seed(seed: int, *streams) -> int:
    """Independent child seed for a named substream of a base seed.

    Stream components may be strings or integers (round numbers etc.).
    """
    h = seed & MASK64
    for name in streams:
        h = (h * 0x9E3779B97F4A7C15 + fnv1a64(str(name))) & MASK64
    return h
