"""Pinned, counter-based pseudo-randomness.

Every random decision in the package is derived from a 64-bit base seed
through the SplitMix64 finalizer, so any implementation that reproduces
the three constants below reproduces every instance and report bit for bit.

    mix64(z):
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9   (mod 2**64)
        z = (z ^ (z >> 27)) * 0x94D049BB133111EB   (mod 2**64)
        return z ^ (z >> 31)

    derive(seed, tag, index) = mix64(mix64(seed ^ mix64(tag + GOLDEN)) + index * GOLDEN)

    stream(key)[i]  = mix64(key + (i + 1) * GOLDEN)         (i = 0, 1, ...)
    uniform(x)      = (x >> 11) * 2**-53                    in [0, 1)

A :class:`Stream` consumes ``stream(key)`` in order; ``randbelow`` uses
rejection against the largest multiple of ``n`` below ``2**64``.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
MUL1 = 0xBF58476D1CE4E5B9
MUL2 = 0x94D049BB133111EB

# stream tags; part of the published format, never renumber
TAG_GRAPH = 1
TAG_LABELS = 2
TAG_TABLES = 3
TAG_CORRUPT = 4
TAG_SUBSAMPLE = 5
TAG_TRIAL = 6
TAG_ROUND = 7
TAG_RANDOM_LABELING = 8
TAG_SEARCH = 9


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * MUL1) & MASK64
    z = ((z ^ (z >> 27)) * MUL2) & MASK64
    return z ^ (z >> 31)


def derive(seed: int, tag: int, index: int = 0) -> int:
    """Key for the sub-stream ``(tag, index)`` of ``seed``."""
    h = mix64((seed & MASK64) ^ mix64(tag + GOLDEN))
    return mix64(h + (index & MASK64) * GOLDEN)


def _mix64_array(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * np.uint64(MUL1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(MUL2)
    return z ^ (z >> np.uint64(31))


def uniform_array(key: int, count: int) -> np.ndarray:
    """First ``count`` uniforms of ``stream(key)`` as float64 in [0, 1).

    Equal element-wise to ``Stream(key).random()`` called ``count`` times.
    """
    idx = np.arange(1, count + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = np.uint64(key & MASK64) + idx * np.uint64(GOLDEN)
        z = _mix64_array(z)
    return (z >> np.uint64(11)).astype(np.float64) * 2.0**-53


class Stream:
    """Sequential draws from ``stream(key)``."""

    def __init__(self, key: int):
        self.key = key & MASK64
        self.counter = 0

    @classmethod
    def from_seed(cls, seed: int, tag: int, index: int = 0) -> "Stream":
        return cls(derive(seed, tag, index))

    def next64(self) -> int:
        self.counter += 1
        return mix64(self.key + self.counter * GOLDEN)

    def random(self) -> float:
        return (self.next64() >> 11) * 2.0**-53

    def randbelow(self, n: int) -> int:
        if n <= 0:
            raise ValueError("randbelow requires n >= 1")
        limit = ((1 << 64) // n) * n
        while True:
            x = self.next64()
            if x < limit:
                return x % n

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates, swapping from the back."""
        for i in range(len(items) - 1, 0, -1):
            j = self.randbelow(i + 1)
            items[i], items[j] = items[j], items[i]

    def sample_indices(self, population: int, k: int) -> list[int]:
        """``k`` distinct indices from ``range(population)`` (partial Fisher-Yates)."""
        if not 0 <= k <= population:
            raise ValueError("sample size out of range")
        pool = list(range(population))
        for i in range(k):
            j = i + self.randbelow(population - i)
            pool[i], pool[j] = pool[j], pool[i]
        return pool[:k]
