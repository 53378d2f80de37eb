"""Seeded xorshift64* generator used for every random sweep and benchmark.

The stream depends only on the seed, so reports are reproducible across
platforms and library versions.
"""

from __future__ import annotations

import numpy as np

_MASK = (1 << 64) - 1


class XorShift64Star:
    def __init__(self, seed: int):
        self.seed = seed
        # splitmix64 scramble so small seeds do not start in a low-entropy state
        z = (seed + 0x9E3779B97F4A7C15) & _MASK
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        self.state = (z ^ (z >> 31)) or 1

    def next_u64(self) -> int:
        x = self.state
        x ^= x >> 12
        x ^= (x << 25) & _MASK
        x ^= x >> 27
        self.state = x
        return (x * 0x2545F4914F6CDD1D) & _MASK

    def random(self) -> float:
        return (self.next_u64() >> 11) / float(1 << 53)

    def randrange(self, lo: int, hi: int | None = None) -> int:
        """Uniform integer in [lo, hi), or [0, lo) with one argument."""
        if hi is None:
            lo, hi = 0, lo
        span = hi - lo
        if span <= 0:
            raise ValueError("empty range")
        limit = (1 << 64) - (1 << 64) % span
        while True:
            x = self.next_u64()
            if x < limit:
                return lo + x % span

    def choice(self, seq):
        return seq[self.randrange(len(seq))]

    def shuffle(self, seq: list) -> list:
        for k in range(len(seq) - 1, 0, -1):
            r = self.randrange(k + 1)
            seq[k], seq[r] = seq[r], seq[k]
        return seq

    def bernoulli_matrix(self, rows: int, cols: int, p: float) -> np.ndarray:
        return np.array([[1 if self.random() < p else 0 for _ in range(cols)] for _ in range(rows)], dtype=np.int64)

    def subset(self, items, p: float) -> list:
        return [x for x in items if self.random() < p]
