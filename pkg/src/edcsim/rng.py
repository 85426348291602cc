"""Seeded randomness with deterministic child streams."""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _splitmix64(x: int) -> int:
    x = (x + _GOLDEN) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def hash64(parent_seed: int, stream_index: int) -> int:
    """Mix a parent seed and a stream index into a child seed."""
    return _splitmix64(_splitmix64(parent_seed & MASK64) ^ (stream_index & MASK64))


class Rng:
    """A single-owner random stream.

    Identical seeds give identical draw sequences. Do not share one instance
    between workers; derive one child per worker with :meth:`child`.
    """

    __slots__ = ("seed", "gen")

    def __init__(self, seed: int = 0):
        self.seed = int(seed) & MASK64
        self.gen = np.random.default_rng(self.seed)

    def child(self, index: int) -> "Rng":
        return Rng(hash64(self.seed, index))

    def random(self, size=None):
        return self.gen.random(size)

    def integers(self, low, high=None, size=None):
        return self.gen.integers(low, high, size=size)

    def permutation(self, x):
        return self.gen.permutation(x)

    def __repr__(self) -> str:
        return f"Rng(seed={self.seed})"


def as_rng(rng: "Rng | int | None") -> Rng:
    if isinstance(rng, Rng):
        return rng
    return Rng(0 if rng is None else rng)
