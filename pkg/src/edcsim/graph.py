"""Immutable simple graphs and multigraphs on dense integer vertex ids."""

from __future__ import annotations

from typing import Iterable

import numpy as np


class GraphError(ValueError):
    """Raised for malformed graph input (self-loops, duplicates, bad ids)."""


def _canonical(edges) -> np.ndarray:
    arr = np.asarray(edges, dtype=np.int64)
    if arr.size == 0:
        return np.empty((0, 2), dtype=np.int64)
    arr = arr.reshape(-1, 2)
    return np.sort(arr, axis=1)


def _edge_keys(edges: np.ndarray, n: int) -> np.ndarray:
    return edges[:, 0] * np.int64(max(n, 1)) + edges[:, 1]


class Graph:
    """Undirected simple graph on vertices ``0..n-1``.

    Edges are stored canonically (``u < v``) in lexicographic order, so edge
    ids are stable positions into :attr:`edges`. An optional ``bipartition``
    (a 0/1 side per vertex) travels with every derived subgraph.
    """

    __slots__ = ("n", "edges", "bipartition", "_keys", "_deg", "_csr")

    def __init__(self, n: int, edges=(), bipartition=None, *, validate: bool = True):
        n = int(n)
        if n < 0:
            raise GraphError(f"vertex count must be nonnegative, got {n}")
        arr = _canonical(edges)
        if validate and len(arr):
            if arr.min() < 0 or arr.max() >= n:
                bad = arr[(arr < 0).any(axis=1) | (arr >= n).any(axis=1)][0]
                raise GraphError(f"edge ({bad[0]}, {bad[1]}) has an endpoint outside [0, {n})")
            loops = arr[:, 0] == arr[:, 1]
            if loops.any():
                v = int(arr[loops][0, 0])
                raise GraphError(f"self-loop on vertex {v}")
        keys = _edge_keys(arr, n)
        order = np.argsort(keys, kind="stable")
        arr, keys = arr[order], keys[order]
        if validate and len(keys) > 1:
            dup = np.flatnonzero(keys[1:] == keys[:-1])
            if len(dup):
                u, v = arr[dup[0]]
                raise GraphError(f"duplicate edge ({u}, {v})")
        arr.setflags(write=False)
        keys.setflags(write=False)
        self.n = n
        self.edges = arr
        self._keys = keys
        self._deg = None
        self._csr = None
        if bipartition is not None:
            bipartition = np.asarray(bipartition, dtype=np.int8)
            if bipartition.shape != (n,):
                raise GraphError("bipartition must assign a side to every vertex")
            bipartition.setflags(write=False)
        self.bipartition = bipartition

    # construction helpers -------------------------------------------------

    @classmethod
    def _from_sorted(cls, n: int, edges: np.ndarray, bipartition=None) -> "Graph":
        # edges already canonical, sorted and duplicate free
        g = cls.__new__(cls)
        g.n = n
        g.edges = edges
        edges.setflags(write=False)
        g._keys = _edge_keys(edges, n)
        g._keys.setflags(write=False)
        g._deg = None
        g._csr = None
        g.bipartition = bipartition
        return g

    @classmethod
    def complete(cls, n: int) -> "Graph":
        iu = np.triu_indices(n, 1)
        return cls._from_sorted(n, np.stack(iu, axis=1).astype(np.int64))

    # basic queries --------------------------------------------------------

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def keys(self) -> np.ndarray:
        return self._keys

    @property
    def degrees(self) -> np.ndarray:
        if self._deg is None:
            deg = np.bincount(self.edges.ravel(), minlength=self.n).astype(np.int64)
            deg.setflags(write=False)
            self._deg = deg
        return self._deg

    def degree(self, v: int) -> int:
        return int(self.degrees[v])

    @property
    def max_degree(self) -> int:
        return int(self.degrees.max()) if self.n and self.m else 0

    def csr(self):
        """Return ``(indptr, neighbors, edge_ids)`` adjacency arrays."""
        if self._csr is None:
            m = self.m
            src = np.concatenate([self.edges[:, 0], self.edges[:, 1]])
            dst = np.concatenate([self.edges[:, 1], self.edges[:, 0]])
            eid = np.concatenate([np.arange(m), np.arange(m)]).astype(np.int64)
            order = np.lexsort((dst, src))
            indptr = np.zeros(self.n + 1, dtype=np.int64)
            np.cumsum(np.bincount(src, minlength=self.n), out=indptr[1:])
            self._csr = (indptr, dst[order].astype(np.int64), eid[order])
        return self._csr

    def neighbors(self, v: int) -> np.ndarray:
        indptr, nbr, _ = self.csr()
        return nbr[indptr[v]:indptr[v + 1]]

    def edge_ids(self, pairs) -> np.ndarray:
        """Positions of ``pairs`` in :attr:`edges`; ``-1`` for absent pairs."""
        p = _canonical(pairs)
        if not len(p):
            return np.empty(0, dtype=np.int64)
        if not self.m:
            return np.full(len(p), -1, dtype=np.int64)
        k = _edge_keys(p, self.n)
        pos = np.minimum(np.searchsorted(self._keys, k), self.m - 1)
        return np.where(self._keys[pos] == k, pos, -1)

    def has_edge(self, u: int, v: int) -> bool:
        if u == v:
            return False
        return bool(self.edge_ids([(u, v)])[0] >= 0)

    def edge_list(self) -> list[tuple[int, int]]:
        return [(int(u), int(v)) for u, v in self.edges]

    # derived graphs -------------------------------------------------------

    def edge_subgraph(self, select) -> "Graph":
        """Subgraph on the same vertex set keeping the selected edges.

        ``select`` is a boolean mask over edges or an array of edge ids.
        """
        select = np.asarray(select)
        if select.dtype == bool:
            kept = self.edges[select]
        else:
            kept = self.edges[np.unique(select.astype(np.int64))]
        return Graph._from_sorted(self.n, np.ascontiguousarray(kept), self.bipartition)

    def edge_mask_within(self, vertex_mask) -> np.ndarray:
        vm = np.asarray(vertex_mask, dtype=bool)
        return vm[self.edges[:, 0]] & vm[self.edges[:, 1]]

    def induced(self, vertex_mask) -> "Graph":
        """Induced subgraph on the vertices where ``vertex_mask`` is true."""
        return self.edge_subgraph(self.edge_mask_within(vertex_mask))

    def without_vertices(self, vertex_mask) -> "Graph":
        return self.induced(~np.asarray(vertex_mask, dtype=bool))

    def union(self, other: "Graph") -> "Graph":
        if other.n != self.n:
            raise GraphError("union of graphs on different vertex sets")
        keys = np.union1d(self._keys, other._keys)
        n = max(self.n, 1)
        edges = np.stack([keys // n, keys % n], axis=1)
        return Graph._from_sorted(self.n, edges, self.bipartition)

    def with_bipartition(self, sides) -> "Graph":
        return Graph._from_sorted(self.n, self.edges, np.asarray(sides, dtype=np.int8))

    def is_bipartition(self, sides=None) -> bool:
        sides = self.bipartition if sides is None else np.asarray(sides)
        if sides is None:
            return False
        return bool(np.all(sides[self.edges[:, 0]] != sides[self.edges[:, 1]]))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and np.array_equal(self._keys, other._keys)

    def __hash__(self):
        return hash((self.n, self._keys.tobytes()))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


class Multigraph:
    """Graph whose edges carry multiplicities; degrees count multiplicity."""

    __slots__ = ("support", "multiplicity", "_deg")

    def __init__(self, support: Graph, multiplicity):
        mult = np.asarray(multiplicity, dtype=np.int64)
        if mult.shape != (support.m,) or (mult < 1).any():
            raise GraphError("multiplicities must be positive, one per support edge")
        self.support = support
        self.multiplicity = mult
        self._deg = None

    @classmethod
    def from_edge_counts(cls, host: Graph, counts) -> "Multigraph":
        """Build from per-host-edge counts (zero-count edges are dropped)."""
        counts = np.asarray(counts, dtype=np.int64)
        keep = counts > 0
        return cls(host.edge_subgraph(keep), counts[keep])

    @property
    def n(self) -> int:
        return self.support.n

    @property
    def m(self) -> int:
        """Number of edges counted with multiplicity."""
        return int(self.multiplicity.sum())

    @property
    def edges(self) -> np.ndarray:
        return self.support.edges

    @property
    def degrees(self) -> np.ndarray:
        if self._deg is None:
            deg = np.zeros(self.n, dtype=np.int64)
            np.add.at(deg, self.support.edges[:, 0], self.multiplicity)
            np.add.at(deg, self.support.edges[:, 1], self.multiplicity)
            self._deg = deg
        return self._deg

    def degree(self, v: int) -> int:
        return int(self.degrees[v])

    @property
    def max_degree(self) -> int:
        return int(self.degrees.max()) if self.n and self.support.m else 0

    def dedup(self) -> Graph:
        return self.support

    def __repr__(self) -> str:
        return f"Multigraph(n={self.n}, support={self.support.m}, m={self.m})"


def graph_from_pairs(n: int, pairs: Iterable[tuple[int, int]], bipartition=None) -> Graph:
    return Graph(n, list(pairs), bipartition)
