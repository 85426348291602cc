"""Seeded test-instance generators."""

from __future__ import annotations

import numpy as np

from .graph import Graph
from .rng import Rng, as_rng


def _from_keys(n: int, keys: np.ndarray, bipartition=None) -> Graph:
    keys = np.unique(keys)
    nn = max(n, 1)
    edges = np.stack([keys // nn, keys % nn], axis=1).astype(np.int64)
    return Graph._from_sorted(n, edges, bipartition)


def gen_random_bipartite(n_left: int, n_right: int, p: float, rng: Rng | int | None = None) -> Graph:
    """Bipartite G(n_left, n_right, p); left ids come first.

    The returned graph carries its bipartition (0 = left, 1 = right).
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    rng = as_rng(rng)
    n = n_left + n_right
    sides = np.concatenate([np.zeros(n_left, np.int8), np.ones(n_right, np.int8)])
    if p >= 1.0:
        hit = np.ones((n_left, n_right), dtype=bool)
    else:
        hit = rng.random((n_left, n_right)) < p
    li, ri = np.nonzero(hit)
    edges = np.stack([li, ri + n_left], axis=1).astype(np.int64)
    return Graph._from_sorted(n, np.ascontiguousarray(edges), sides)


def gen_random_graph(n: int, p: float, rng: Rng | int | None = None) -> Graph:
    """Erdos-Renyi G(n, p)."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    rng = as_rng(rng)
    iu, iv = np.triu_indices(n, 1)
    keep = rng.random(len(iu)) < p
    edges = np.stack([iu[keep], iv[keep]], axis=1).astype(np.int64)
    return Graph._from_sorted(n, np.ascontiguousarray(edges))


def gen_regular_ish(n: int, d: int, rng: Rng | int | None = None, repair_rounds: int = 20) -> Graph:
    """Near-``d``-regular graph: a union of ``d`` random perfect matchings.

    Pairs that repeat are dropped and the lost degree is patched by pairing
    deficit stubs at random. Degrees never exceed ``d``; a handful of
    vertices may end one or two short.
    """
    rng = as_rng(rng)
    if n < 2 or d <= 0:
        return Graph(n)
    d = min(d, n - 1)
    half = n // 2
    rows = []
    for _ in range(d):
        perm = rng.permutation(n)[: 2 * half].reshape(half, 2)
        rows.append(perm)
    pairs = np.sort(np.concatenate(rows), axis=1).astype(np.int64)
    keys = np.unique(pairs[:, 0] * n + pairs[:, 1])
    for _ in range(repair_rounds):
        deg = np.bincount(np.concatenate([keys // n, keys % n]), minlength=n)
        deficit = d - deg
        stubs = np.repeat(np.arange(n), np.maximum(deficit, 0))
        if len(stubs) < 2:
            break
        stubs = rng.permutation(stubs)
        stubs = stubs[: 2 * (len(stubs) // 2)].reshape(-1, 2)
        stubs = np.sort(stubs, axis=1)
        stubs = stubs[stubs[:, 0] != stubs[:, 1]]
        cand, first = np.unique(stubs[:, 0] * n + stubs[:, 1], return_index=True)
        cand = cand[np.argsort(first)]
        cand = cand[~np.isin(cand, keys)]
        if not len(cand):
            continue
        # a vertex may appear in several candidate pairs; never exceed d
        cu, cv = cand // n, cand % n
        room = deficit.copy()
        accept = np.zeros(len(cand), dtype=bool)
        for i in range(len(cand)):
            a, b = cu[i], cv[i]
            if room[a] > 0 and room[b] > 0:
                room[a] -= 1
                room[b] -= 1
                accept[i] = True
        keys = np.union1d(keys, cand[accept])
    return _from_keys(n, keys)


def gen_path(n: int) -> Graph:
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def gen_cycle(n: int) -> Graph:
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def gen_star(leaves: int) -> Graph:
    return Graph(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def gen_complete_bipartite(a: int, b: int) -> Graph:
    return gen_random_bipartite(a, b, 1.0)


def gen_petersen() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return Graph(10, outer + spokes + inner)


def gen_perfect_matching(pairs: int) -> Graph:
    """``pairs`` disjoint edges (2*pairs vertices)."""
    sides = np.tile(np.array([0, 1], np.int8), pairs)
    return Graph(2 * pairs, [(2 * i, 2 * i + 1) for i in range(pairs)], sides)
