"""k-wise independent hashing via random polynomials over a prime field."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .rng import Rng, as_rng

MERSENNE_61 = (1 << 61) - 1
MERSENNE_31 = (1 << 31) - 1


@dataclass(frozen=True)
class KWiseHash:
    """``h(x) = (sum_j c_j x^j mod q) mod range`` with ``kappa`` coefficients.

    For ``kappa`` distinct inputs below ``q`` the outputs are independent and
    uniform up to a reduction bias below ``kappa * range / q``.
    """

    kappa: int
    modulus: int
    coeffs: tuple[int, ...]
    range: int

    def __post_init__(self):
        if self.kappa < 1:
            raise ValueError("kappa must be at least 1")
        if self.range < 1:
            raise ValueError("hash range must be at least 1")
        if self.range > self.modulus:
            raise ValueError(f"hash range {self.range} exceeds field size {self.modulus}")
        if len(self.coeffs) != self.kappa:
            raise ValueError("need exactly kappa coefficients")

    def __call__(self, x: int) -> int:
        return kwise_hash_eval(self, x)

    def eval_many(self, xs) -> np.ndarray:
        xs = np.asarray(xs, dtype=np.int64)
        if self.range == 1:
            return np.zeros(xs.shape, dtype=np.int64)
        if self.modulus <= MERSENNE_31:
            q = np.int64(self.modulus)
            x = xs % q
            acc = np.zeros(xs.shape, dtype=np.int64)
            for c in reversed(self.coeffs):
                acc = (acc * x + c) % q
            return acc % self.range
        return np.array([kwise_hash_eval(self, int(x)) for x in xs.ravel()],
                        dtype=np.int64).reshape(xs.shape)


def kwise_hash_new(kappa: int, range_: int, rng: Rng | int | None = None,
                   modulus: int = MERSENNE_61) -> KWiseHash:
    """Draw a hash from the degree-(kappa-1) polynomial family."""
    if range_ > modulus:
        raise ValueError(f"hash range {range_} exceeds field size {modulus}")
    gen = as_rng(rng).gen
    coeffs = tuple(int(c) for c in gen.integers(0, modulus, size=int(kappa), dtype=np.uint64))
    return KWiseHash(int(kappa), int(modulus), coeffs, int(range_))


def kwise_hash_eval(h: KWiseHash, x: int) -> int:
    if h.range == 1:
        return 0
    q = h.modulus
    x %= q
    acc = 0
    for c in reversed(h.coeffs):
        acc = (acc * x + c) % q
    return acc % h.range


def membership_matrix(n_vertices: int, k: int, kappa: int, range_: int, rng: Rng,
                      modulus: int = MERSENNE_31) -> np.ndarray:
    """``M[v, i]`` is true iff vertex ``v``'s own hash sends index ``i`` to 0.

    Every vertex draws an independent ``kappa``-wise independent hash over the
    machine indices ``[0, k)``; the rows are therefore independent and the
    entries within a row are ``kappa``-wise independent.
    """
    if range_ == 1:
        return np.ones((n_vertices, k), dtype=bool)
    if k >= modulus:
        raise ValueError("machine count must stay below the field size")
    coeffs = rng.gen.integers(0, modulus, size=(n_vertices, kappa), dtype=np.int64)
    x = np.arange(k, dtype=np.int64)[None, :]
    acc = np.zeros((n_vertices, k), dtype=np.int64)
    q = np.int64(modulus)
    for j in range(kappa - 1, -1, -1):
        acc = (acc * x + coeffs[:, j:j + 1]) % q
    return (acc % range_) == 0
