"""Matchings, vertex covers, and exact/approximate oracles for them."""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import breadth_first_order, maximum_bipartite_matching

from ._kernels import greedy_matching_kernel
from .graph import Graph, GraphError

DEFAULT_CAP_VERTICES = 24
DEFAULT_CAP_EDGES = 40


class OracleTooLarge(ValueError):
    """The instance exceeds the brute-force oracle's configured size cap."""


@dataclass(frozen=True)
class Matching:
    edges: np.ndarray

    @classmethod
    def from_pairs(cls, pairs) -> "Matching":
        arr = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
        arr = np.sort(arr, axis=1)
        if len(arr):
            arr = arr[np.lexsort((arr[:, 1], arr[:, 0]))]
        arr.setflags(write=False)
        return cls(arr)

    @property
    def size(self) -> int:
        return len(self.edges)

    def __len__(self) -> int:
        return len(self.edges)

    @property
    def vertices(self) -> np.ndarray:
        """V(M): the matched vertices, sorted."""
        return np.unique(self.edges.ravel())

    def pairs(self) -> list[tuple[int, int]]:
        return [(int(u), int(v)) for u, v in self.edges]

    def union(self, other: "Matching") -> "Matching":
        return Matching.from_pairs(np.concatenate([self.edges, other.edges]))


@dataclass(frozen=True)
class VertexCover:
    vertices: np.ndarray

    @classmethod
    def of(cls, vertices) -> "VertexCover":
        arr = np.unique(np.asarray(list(vertices) if not isinstance(vertices, np.ndarray)
                                   else vertices, dtype=np.int64))
        arr.setflags(write=False)
        return cls(arr)

    @property
    def size(self) -> int:
        return len(self.vertices)

    def __len__(self) -> int:
        return len(self.vertices)

    def union(self, other) -> "VertexCover":
        o = other.vertices if isinstance(other, VertexCover) else np.asarray(other, dtype=np.int64)
        return VertexCover.of(np.concatenate([self.vertices, o]))


def oracle_caps() -> tuple[int, int]:
    """Brute-force caps ``(vertices, edges)``; ``EDCS_ORACLE_CAP`` may set ``"V"`` or ``"V,E"``."""
    raw = os.environ.get("EDCS_ORACLE_CAP")
    if not raw:
        return DEFAULT_CAP_VERTICES, DEFAULT_CAP_EDGES
    parts = [int(x) for x in raw.replace(" ", "").split(",") if x]
    if len(parts) == 1:
        return parts[0], DEFAULT_CAP_EDGES
    return parts[0], parts[1]


# -- feasibility ------------------------------------------------------------

def is_matching(g: Graph, m: Matching) -> bool:
    if m.size == 0:
        return True
    if (g.edge_ids(m.edges) < 0).any():
        return False
    return len(np.unique(m.edges.ravel())) == 2 * m.size


def is_cover(g: Graph, c: VertexCover) -> bool:
    inside = np.zeros(g.n, dtype=bool)
    if c.size:
        inside[c.vertices] = True
    return bool(np.all(inside[g.edges[:, 0]] | inside[g.edges[:, 1]]))


def check_duality(m, c, alpha) -> bool:
    """True iff ``alpha * |m| >= |c|``, certifying both as alpha-approximate."""
    msize = m if isinstance(m, (int, np.integer)) else len(m)
    csize = c if isinstance(c, (int, np.integer)) else len(c)
    return Fraction(alpha) * msize >= csize


def vizing_lower_bound(delta: int, gamma, n_high: int) -> Fraction:
    """Matching-size floor ``gamma*delta*|V_high| / (2*(delta+1))`` from Vizing's theorem."""
    return Fraction(gamma) * delta * n_high / (2 * (delta + 1))


# -- approximate ------------------------------------------------------------

def greedy_maximal_matching(g: Graph, order=None) -> Matching:
    """Scan edges in ``order`` and keep each edge whose endpoints are both free.

    ``order`` may be ``None`` (edge-id order), an array of edge ids, or a
    list of vertex pairs.
    """
    if g.m == 0:
        return Matching.from_pairs([])
    if order is None:
        ids = np.arange(g.m, dtype=np.int64)
    else:
        arr = np.asarray(order, dtype=np.int64)
        if arr.ndim == 2:
            ids = g.edge_ids(arr)
            if (ids < 0).any():
                raise GraphError("ordering names an edge that is not in the graph")
        else:
            ids = arr
    take = greedy_matching_kernel(g.n, g.edges, ids)
    return Matching.from_pairs(g.edges[take])


# -- exact, bipartite -------------------------------------------------------

def _sides(g: Graph, bipartition) -> np.ndarray:
    sides = g.bipartition if bipartition is None else np.asarray(bipartition, dtype=np.int8)
    if sides is None:
        raise GraphError("no bipartition supplied for a bipartite oracle")
    if sides.shape != (g.n,):
        raise GraphError("bipartition must color every vertex")
    same = sides[g.edges[:, 0]] == sides[g.edges[:, 1]]
    if same.any():
        u, v = g.edges[np.argmax(same)]
        raise GraphError(f"edge ({u}, {v}) lies inside one side of the bipartition")
    return sides


def _bipartite_match(g: Graph, sides: np.ndarray):
    left = np.flatnonzero(sides == 0)
    right = np.flatnonzero(sides == 1)
    lpos = np.full(g.n, -1, dtype=np.int64)
    rpos = np.full(g.n, -1, dtype=np.int64)
    lpos[left] = np.arange(len(left))
    rpos[right] = np.arange(len(right))
    a, b = g.edges[:, 0], g.edges[:, 1]
    lu = np.where(sides[a] == 0, a, b)
    rv = np.where(sides[a] == 0, b, a)
    biadj = csr_matrix((np.ones(g.m, dtype=np.int8), (lpos[lu], rpos[rv])),
                       shape=(len(left), len(right)))
    mate = maximum_bipartite_matching(biadj, perm_type="column")
    return left, right, lu, rv, mate


def hopcroft_karp(g: Graph, bipartition=None) -> Matching:
    """Maximum-cardinality matching of a bipartite graph.

    ``bipartition`` defaults to the graph's own coloring; an edge inside one
    color class raises :class:`GraphError`.
    """
    sides = _sides(g, bipartition)
    if g.m == 0:
        return Matching.from_pairs([])
    left, right, *_, mate = _bipartite_match(g, sides)
    rows = np.flatnonzero(mate >= 0)
    return Matching.from_pairs(np.stack([left[rows], right[mate[rows]]], axis=1))


def konig_vertex_cover(g: Graph, bipartition=None) -> VertexCover:
    """Minimum vertex cover of a bipartite graph via Konig's theorem."""
    sides = _sides(g, bipartition)
    if g.m == 0:
        return VertexCover.of([])
    left, right, lu, rv, mate = _bipartite_match(g, sides)
    mate_of = np.full(g.n, -1, dtype=np.int64)
    rows = np.flatnonzero(mate >= 0)
    mate_of[left[rows]] = right[mate[rows]]
    mate_of[right[mate[rows]]] = left[rows]
    # alternating reachability from free left vertices: L->R on non-matching
    # edges, R->L on matching edges; node n is a virtual source
    nonmatch = mate_of[lu] != rv
    free_left = left[mate_of[left] < 0]
    src = np.concatenate([lu[nonmatch], right[mate[rows]], np.full(len(free_left), g.n)])
    dst = np.concatenate([rv[nonmatch], left[rows], free_left])
    digraph = csr_matrix((np.ones(len(src), dtype=np.int8), (src, dst)), shape=(g.n + 1, g.n + 1))
    reach = np.zeros(g.n + 1, dtype=bool)
    reach[breadth_first_order(digraph, g.n, directed=True, return_predecessors=False)] = True
    reach = reach[: g.n]
    touched = np.zeros(g.n, dtype=bool)
    touched[g.edges.ravel()] = True
    cover = (touched & (sides == 0) & ~reach) | ((sides == 1) & reach)
    return VertexCover.of(np.flatnonzero(cover))


def maximum_matching(g: Graph, solver: str = "auto") -> Matching:
    """Dispatch to an exact solver: Hopcroft-Karp if bipartite, else brute force."""
    if solver == "greedy":
        return greedy_maximal_matching(g)
    if solver in ("hopcroft_karp", "hk") or (solver == "auto" and g.bipartition is not None):
        return hopcroft_karp(g)
    if solver in ("bruteforce", "auto"):
        return maximum_matching_bruteforce(g)
    raise ValueError(f"unknown matching solver {solver!r}")


def matching_number(g: Graph, solver: str = "auto") -> int:
    return maximum_matching(g, solver).size


# -- exact, brute force -----------------------------------------------------

def _compact(g: Graph):
    active = np.flatnonzero(g.degrees > 0)
    cap_v, cap_e = oracle_caps()
    if len(active) > cap_v and g.m > cap_e:
        raise OracleTooLarge(
            f"oracle too large: {len(active)} active vertices and {g.m} edges "
            f"(caps {cap_v} vertices or {cap_e} edges; set EDCS_ORACLE_CAP)")
    pos = {int(v): i for i, v in enumerate(active)}
    adj = [0] * len(active)
    for u, v in g.edges.tolist():
        adj[pos[u]] |= 1 << pos[v]
        adj[pos[v]] |= 1 << pos[u]
    return active, adj


def _bits(x: int):
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


def maximum_matching_bruteforce(g: Graph) -> Matching:
    """Exact maximum matching by memoized branching (small graphs only).

    Branches on the lowest-numbered vertex that still has a neighbor, so
    ties resolve toward lexicographically smaller edges.
    """
    active, adj = _compact(g)
    memo: dict[int, tuple[int, tuple]] = {}

    def solve(mask: int) -> tuple[int, tuple]:
        while mask:
            v = (mask & -mask).bit_length() - 1
            if adj[v] & mask:
                break
            mask &= ~(1 << v)
        if not mask:
            return 0, ()
        hit = memo.get(mask)
        if hit is not None:
            return hit
        rest = mask & ~(1 << v)
        best = (-1, ())
        ub = bin(mask).count("1") // 2
        for u in _bits(adj[v] & mask):
            size, pairs = solve(rest & ~(1 << u))
            if size + 1 > best[0]:
                best = (size + 1, ((v, u),) + pairs)
                if best[0] == ub:
                    break
        if best[0] < ub:
            size, pairs = solve(rest)
            if size > best[0]:
                best = (size, pairs)
        memo[mask] = best
        return best

    _, pairs = solve((1 << len(active)) - 1)
    return Matching.from_pairs([(active[a], active[b]) for a, b in pairs])


def exact_mm_bruteforce(g: Graph) -> int:
    return maximum_matching_bruteforce(g).size


def exact_vc_bruteforce(g: Graph) -> VertexCover:
    """Exact minimum vertex cover by memoized branching (small graphs only).

    On the highest-degree vertex v: either v joins the cover, or all of its
    neighbors do. Ties between the two branches go to the lexicographically
    smaller sorted vertex tuple, so the result is deterministic.
    """
    active, adj = _compact(g)
    memo: dict[int, tuple[int, ...]] = {}

    def solve(mask: int) -> tuple[int, ...]:
        hit = memo.get(mask)
        if hit is not None:
            return hit
        best_v, best_d = -1, 0
        for v in _bits(mask):
            d = bin(adj[v] & mask).count("1")
            if d > best_d:
                best_v, best_d = v, d
        if best_d == 0:
            return ()
        v = best_v
        with_v = tuple(sorted((v,) + solve(mask & ~(1 << v))))
        nbrs = adj[v] & mask
        without_v = tuple(sorted(tuple(_bits(nbrs)) + solve(mask & ~nbrs & ~(1 << v))))
        out = min(with_v, without_v, key=lambda c: (len(c), c))
        memo[mask] = out
        return out

    cover = solve((1 << len(active)) - 1)
    return VertexCover.of([int(active[i]) for i in cover])


def exact_vertex_cover(g: Graph) -> VertexCover:
    """Konig on bipartite graphs, brute force otherwise."""
    if g.bipartition is not None:
        return konig_vertex_cover(g)
    return exact_vc_bruteforce(g)
