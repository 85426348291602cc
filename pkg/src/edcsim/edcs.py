"""Edge degree constrained subgraphs: construction, validation and use.

An EDCS ``H`` of ``G`` with integers ``beta > beta_minus >= 0`` satisfies

* P1: every edge ``(u, v)`` of ``H`` has ``deg_H(u) + deg_H(v) <= beta``;
* P2: every edge ``(u, v)`` of ``G - H`` has ``deg_H(u) + deg_H(v) >= beta_minus``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Literal

import numpy as np

from ._kernels import edcs_fix_kernel
from .graph import Graph
from .io import format_graph, parse_graph
from .matching import (Matching, VertexCover, exact_vertex_cover, greedy_maximal_matching,
                       maximum_matching)
from .rng import Rng, as_rng


_BIG = 1 << 62


@dataclass(frozen=True)
class EdcsParams:
    beta: int
    beta_minus: int

    def __post_init__(self):
        if int(self.beta) != self.beta or int(self.beta_minus) != self.beta_minus:
            raise ValueError("EDCS parameters must be integers")
        if not self.beta > self.beta_minus >= 0:
            raise ValueError(f"need beta > beta_minus >= 0, got ({self.beta}, {self.beta_minus})")
        object.__setattr__(self, "beta", int(self.beta))
        object.__setattr__(self, "beta_minus", int(self.beta_minus))

    @classmethod
    def from_lambda(cls, beta: int, lam: float) -> "EdcsParams":
        """``beta_minus = floor((1 - lam) * beta)``, clipped to ``beta - 1``."""
        bm = math.floor((1.0 - lam) * beta + 1e-9)
        return cls(beta, max(0, min(bm, beta - 1)))

    @property
    def lam(self) -> float:
        return 1.0 - self.beta_minus / self.beta


@dataclass(frozen=True)
class Violation:
    edge: tuple[int, int]
    prop: Literal["P1", "P2", "degree"]
    degree_sum: int


@dataclass
class FixTrace:
    """Potential values along a construction (``phi[0]`` is the start)."""

    steps: int
    phi: np.ndarray
    min_increment: float
    beta: int = 0

    @property
    def strictly_increasing(self) -> bool:
        if self.steps == 0:
            return True
        if len(self.phi) > 1:
            return bool(np.all(np.diff(self.phi) >= 1))
        return self.min_increment >= 1


@dataclass
class Edcs:
    """A subgraph ``H`` of ``host`` (edge mask ``in_h``) with cached degrees."""

    host: Graph
    in_h: np.ndarray
    deg: np.ndarray
    params: EdcsParams
    _graph: Graph | None = field(default=None, repr=False)

    @classmethod
    def from_subgraph(cls, host: Graph, sub, params: EdcsParams) -> "Edcs":
        """Wrap a host-edge mask, host-edge ids, or subgraph as an (unchecked) Edcs."""
        if isinstance(sub, Graph):
            ids = host.edge_ids(sub.edges)
            if (ids < 0).any():
                raise ValueError("subgraph has an edge outside the host graph")
            mask = np.zeros(host.m, dtype=bool)
            mask[ids] = True
        else:
            sub = np.asarray(sub)
            if sub.dtype == bool:
                mask = sub.copy()
            else:
                mask = np.zeros(host.m, dtype=bool)
                mask[sub.astype(np.int64)] = True
        deg = np.bincount(host.edges[mask].ravel(), minlength=host.n).astype(np.int64)
        return cls(host, mask, deg, params)

    @property
    def edge_ids(self) -> np.ndarray:
        return np.flatnonzero(self.in_h)

    @property
    def size(self) -> int:
        return int(self.in_h.sum())

    @property
    def graph(self) -> Graph:
        if self._graph is None:
            self._graph = self.host.edge_subgraph(self.in_h)
        return self._graph

    def high_vertices(self, threshold2: int | None = None) -> np.ndarray:
        """Vertices with ``2 * deg_H(v) >= beta_minus`` (or the given doubled threshold)."""
        t = self.params.beta_minus if threshold2 is None else threshold2
        return np.flatnonzero(2 * self.deg >= t)


def potential(e: Edcs) -> Fraction:
    """``(beta - 1/2) * sum_u deg(u) - sum_{(u,v) in H} (deg(u) + deg(v))`` from scratch."""
    deg = np.bincount(e.host.edges[e.in_h].ravel(), minlength=e.host.n)
    h = e.host.edges[e.in_h]
    edge_term = int((deg[h[:, 0]] + deg[h[:, 1]]).sum())
    return (Fraction(2 * e.params.beta - 1, 2) * int(deg.sum())) - edge_term


def _start_mask(g: Graph, start, rng: Rng) -> np.ndarray:
    if start is None or (isinstance(start, str) and start == "empty"):
        return np.zeros(g.m, dtype=bool)
    if isinstance(start, str):
        if start == "all":
            return np.ones(g.m, dtype=bool)
        if start == "random":
            return rng.random(g.m) < 0.5
        raise ValueError(f"unknown start set {start!r}")
    if isinstance(start, Graph):
        ids = g.edge_ids(start.edges)
    else:
        arr = np.asarray(start)
        if arr.dtype == bool:
            if arr.shape != (g.m,):
                raise ValueError("start mask must have one entry per host edge")
            return arr.copy()
        ids = g.edge_ids(arr) if arr.ndim == 2 else arr.astype(np.int64)
    if len(ids) and (ids < 0).any():
        raise ValueError("start set must be a subset of the host edges")
    mask = np.zeros(g.m, dtype=bool)
    mask[ids] = True
    return mask


def effective_params(params: EdcsParams, max_degree: int) -> EdcsParams:
    """Smallest parameters with exactly the same EDCS set at this max degree ``D``.

    Degree sums never exceed ``2D`` on ``H`` edges and ``2D - 2`` on missing
    edges, so any ``beta >= 2D`` acts like ``2D`` and any ``beta_minus >= 2D - 1``
    acts like ``2D - 1``. Clamping keeps the arithmetic inside 64 bits for the
    astronomically large theory-mode parameters.
    """
    d = max(int(max_degree), 1)
    beta = min(params.beta, 2 * d)
    beta_minus = min(params.beta_minus, 2 * d - 1)
    if (beta, beta_minus) == (params.beta, params.beta_minus):
        return params
    return EdcsParams(beta, beta_minus)


def construct_edcs(g: Graph, params: EdcsParams, start=None, order: str = "queue",
                   rng: Rng | int | None = None, record: bool = True) -> tuple[Edcs, FixTrace]:
    """Repeatedly fix a violating edge until ``H`` is an EDCS of ``g``.

    Fixing removes a P1-violating edge from ``H`` or adds a P2-violating one.
    Every fix raises the potential by at least one, so the loop stops.

    Args:
        start: initial ``H``: ``None``/``"empty"``, ``"all"``, ``"random"``, a
            host-edge mask, host-edge ids, vertex pairs, or a subgraph.
        order: ``"queue"`` keeps FIFO queues of edges near a degree change,
            serving P1 candidates first; ``"scan"`` sweeps all edges in a
            random order until a sweep finds nothing to fix.
        rng: seeds the scan order (and a random start). Without it the queue
            policy visits edges in id order.
        record: keep every potential value, not just the smallest step.
    """
    if order not in ("queue", "scan"):
        raise ValueError(f"unknown violation-scan policy {order!r}")
    explicit_rng = rng is not None
    rng = as_rng(rng)
    in_h = _start_mask(g, start, rng)
    if order == "scan" or explicit_rng:
        scan = rng.permutation(g.m).astype(np.int64)
    else:
        scan = np.arange(g.m, dtype=np.int64)
    run = effective_params(params, g.max_degree)
    indptr, nbr, eid = g.csr()
    deg, steps, min_step, phi2, tlen = edcs_fix_kernel(
        g.n, g.edges, indptr, nbr, eid, run.beta, run.beta_minus, in_h, scan,
        1 if order == "scan" else 0, record)
    phi = phi2[:tlen] / 2.0 if record else np.empty(0)
    trace = FixTrace(int(steps), phi, float(min_step) / 2.0 if steps else math.inf, run.beta)
    return Edcs(g, in_h, deg, params), trace


def validate_edcs(e: Edcs, params: EdcsParams | None = None) -> list[Violation]:
    """All property violations of ``e`` (empty iff it is an EDCS).

    Degrees are recomputed from the edge set; a stale cache is reported as a
    ``"degree"`` violation. ``params`` overrides the parameters checked.
    """
    params = params or e.params
    g = e.host
    deg = np.bincount(g.edges[e.in_h].ravel(), minlength=g.n).astype(np.int64)
    out: list[Violation] = []
    stale = np.flatnonzero(deg != e.deg)
    for v in stale.tolist():
        out.append(Violation((v, v), "degree", int(e.deg[v])))
    sums = deg[g.edges[:, 0]] + deg[g.edges[:, 1]]
    p1 = np.flatnonzero(e.in_h & (sums > min(params.beta, _BIG)))
    p2 = np.flatnonzero(~e.in_h & (sums < min(params.beta_minus, _BIG)))
    for i in p1.tolist():
        out.append(Violation((int(g.edges[i, 0]), int(g.edges[i, 1])), "P1", int(sums[i])))
    for i in p2.tolist():
        out.append(Violation((int(g.edges[i, 0]), int(g.edges[i, 1])), "P2", int(sums[i])))
    return out


def degree_sum_extremes(host: Graph, in_h: np.ndarray) -> tuple[int, int]:
    """(max degree sum over H edges, min degree sum over non-H edges)."""
    deg = np.bincount(host.edges[in_h].ravel(), minlength=host.n)
    sums = deg[host.edges[:, 0]] + deg[host.edges[:, 1]]
    hi = int(sums[in_h].max()) if in_h.any() else 0
    lo = int(sums[~in_h].min()) if (~in_h).any() else math.inf
    return hi, lo


def edcs_matching(e: Edcs, solver: str = "auto") -> Matching:
    """A matching of ``H``: exact (Hopcroft-Karp/brute force) or ``"greedy"`` maximal."""
    return maximum_matching(e.graph, solver)


def edcs_vertex_cover(e: Edcs, strategy: str = "exact") -> VertexCover:
    """``V_high`` plus a cover of ``H``; a feasible cover of the host graph.

    ``V_high`` holds every vertex with ``2 * deg_H(v) >= beta_minus``, which
    by P2 touches every host edge missing from ``H``. The cover of ``H`` is
    exact (``"exact"``) or the endpoints of a maximal matching (``"matched"``).
    """
    high = e.high_vertices()
    if strategy == "exact":
        inner = exact_vertex_cover(e.graph)
    elif strategy == "matched":
        inner = VertexCover.of(greedy_maximal_matching(e.graph).vertices)
    else:
        raise ValueError(f"unknown cover strategy {strategy!r}")
    return inner.union(high)


def degree_gap(a: Edcs, b: Edcs, common=None) -> int:
    """Largest ``|deg_A(v) - deg_B(v)|`` over all vertices or over ``common``."""
    if a.params != b.params:
        raise ValueError("degree_gap compares EDCS built with identical parameters")
    diff = np.abs(a.deg - b.deg)
    if common is not None:
        diff = diff[np.asarray(common)]
    return int(diff.max()) if diff.size else 0


_HEADER = re.compile(r"#\s*edcs\s+beta=(\d+)\s+beta_minus=(\d+)")


def format_edcs(e: Edcs) -> str:
    p = e.params
    return format_graph(e.graph, f"# edcs beta={p.beta} beta_minus={p.beta_minus}")


def parse_edcs(text: str, host: Graph) -> Edcs:
    sub, headers = parse_graph(text)
    for h in headers:
        match = _HEADER.fullmatch(h.strip())
        if match:
            params = EdcsParams(int(match.group(1)), int(match.group(2)))
            break
    else:
        raise ValueError("missing '# edcs beta=<b> beta_minus=<b->' header")
    if sub.n != host.n:
        raise ValueError("EDCS file and host graph disagree on vertex count")
    return Edcs.from_subgraph(host, sub, params)
