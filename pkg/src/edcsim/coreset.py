"""Randomized composable coresets for matching and vertex cover.

The host edges are split by a random k-partition. Each part is summarized
on its own (a maximum matching, or an EDCS) and the summaries are unioned.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .edcs import Edcs, EdcsParams, construct_edcs, degree_sum_extremes, validate_edcs
from .graph import Graph, GraphError
from .io import write_graph
from .matching import (Matching, OracleTooLarge, VertexCover, exact_vertex_cover,
                       greedy_maximal_matching, hopcroft_karp, maximum_matching)
from .report import ApproxReport
from .rng import Rng, as_rng
from .sampling import random_k_partition

# theory schedule: lam = LAMBDA_SCALE * (eps / ln n)^2, beta = BETA_SCALE * lam^-3 * ln n
LAMBDA_SCALE = 1e-4
BETA_SCALE = 750


@dataclass(frozen=True)
class CoresetParams:
    """Part count, per-part EDCS parameters and slack ``eps``.

    ``composed_lambda`` is the slack of the union's EDCS guarantee; it is only
    scheduled in theory mode (practice runs fit it from the data instead).
    """

    k: int
    edcs: EdcsParams
    eps: float = 0.1
    mode: str = "practice"
    composed_lambda: float | None = None

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"part count must be at least 1, got {self.k}")
        if not 0 < self.eps < 1:
            raise ValueError(f"eps must lie in (0, 1), got {self.eps}")
        if self.mode not in ("theory", "practice"):
            raise ValueError(f"unknown parameter mode {self.mode!r}")

    @classmethod
    def theory(cls, n: int, k: int, eps: float) -> "CoresetParams":
        ln = math.log(max(n, 3))
        lam = LAMBDA_SCALE * (eps / ln) ** 2
        beta = math.ceil(BETA_SCALE * lam ** -3 * ln)
        return cls(k, EdcsParams.from_lambda(beta, lam), eps, "theory", ln * math.sqrt(lam))

    @classmethod
    def practice(cls, k: int, beta: int, beta_minus: int, eps: float = 0.1) -> "CoresetParams":
        return cls(k, EdcsParams(beta, beta_minus), eps, "practice")

    @property
    def cover_threshold2(self) -> int:
        """Doubled per-part degree at which a vertex is fixed into the cover.

        ``(1 - eps) * beta`` rounded up, but never above ``beta_minus``: every
        edge a part drops has a degree sum of at least ``beta_minus`` there, so
        one endpoint reaches the threshold and the cover stays feasible.
        """
        b = self.edcs.beta
        return min(math.ceil(round((1 - self.eps) * b, 9)), self.edcs.beta_minus)

    def composed(self, lam: float | None = None) -> EdcsParams:
        """Union parameters ``((1 + lam) k beta, (1 - 2 lam) k beta)`` as integers."""
        lam = self.composed_lambda if lam is None else lam
        if lam is None:
            raise ValueError("practice-mode parameters carry no composed slack; pass lam")
        kb = self.k * self.edcs.beta
        hi = math.floor((1 + lam) * kb + 1e-9)
        lo = max(0, math.ceil((1 - 2 * lam) * kb - 1e-9))
        return EdcsParams(hi, min(lo, hi - 1))

    def as_dict(self) -> dict:
        return {"k": self.k, "beta": self.edcs.beta, "beta_minus": self.edcs.beta_minus,
                "eps": self.eps, "mode": self.mode, "composed_lambda": self.composed_lambda}


@dataclass
class CoresetResult:
    """Per-part coresets as host-edge ids, their union, and fixed cover vertices."""

    host: Graph
    k: int
    kind: str
    parts: list[np.ndarray]
    part_sizes: np.ndarray
    params: CoresetParams | None = None
    fixed: np.ndarray | None = None
    seed: int | None = None
    flags: dict = field(default_factory=dict)

    @property
    def union_mask(self) -> np.ndarray:
        mask = np.zeros(self.host.m, dtype=bool)
        for ids in self.parts:
            mask[ids] = True
        return mask

    @property
    def union(self) -> Graph:
        return self.host.edge_subgraph(self.union_mask)

    def coreset(self, i: int) -> Graph:
        return self.host.edge_subgraph(self.parts[i])

    @property
    def resources(self) -> dict:
        sizes = [len(p) for p in self.parts]
        return {
            "max_part_edges": int(self.part_sizes.max()) if len(self.part_sizes) else 0,
            "max_coreset_edges": max(sizes, default=0),
            "communication": int(sum(sizes)),
        }


def _partition(g: Graph, k: int, rng: Rng):
    part = random_k_partition(g, k, rng.child(0))
    return [part.part_ids(i) for i in range(k)], part.sizes()


def maxmatching_coreset(g: Graph, k: int, rng: Rng | int | None = None,
                        solver: str = "auto") -> CoresetResult:
    """Each part contributes one maximum matching of its edges."""
    rng = as_rng(rng)
    ids, sizes = _partition(g, k, rng)
    parts = []
    for pid in ids:
        m = maximum_matching(g.edge_subgraph(pid), solver)
        parts.append(np.sort(g.edge_ids(m.edges)))
    return CoresetResult(g, k, "maxmatching", parts, sizes, seed=rng.seed)


def edcs_coreset(g: Graph, params: CoresetParams, rng: Rng | int | None = None,
                 order: str = "queue") -> CoresetResult:
    """Each part contributes an EDCS of its edges with the shared parameters.

    Vertices whose doubled degree in some part's EDCS reaches
    ``params.cover_threshold2`` are collected as the fixed cover vertices.
    """
    rng = as_rng(rng)
    ids, sizes = _partition(g, params.k, rng)
    parts = []
    fixed = np.zeros(g.n, dtype=bool)
    for i, pid in enumerate(ids):
        e, _ = construct_edcs(g.edge_subgraph(pid), params.edcs, order=order,
                              rng=rng.child(i + 1), record=False)
        # part edge j is host edge pid[j]: both lists are sorted by key
        parts.append(pid[e.in_h])
        fixed |= 2 * e.deg >= params.cover_threshold2
    return CoresetResult(g, params.k, "edcs", parts, sizes, params, np.flatnonzero(fixed), rng.seed)


def union_edcs(r: CoresetResult, composed: EdcsParams) -> Edcs:
    return Edcs.from_subgraph(r.host, r.union_mask, composed)


def validate_union(r: CoresetResult, lam: float | None = None):
    """Violations of the union against the composed parameters."""
    return validate_edcs(union_edcs(r, r.params.composed(lam)))


def fitted_lambda(r: CoresetResult) -> float:
    """Smallest ``lam >= 0`` for which the union is an EDCS at the composed parameters."""
    kb = r.k * r.params.edcs.beta
    hi, lo = degree_sum_extremes(r.host, r.union_mask)
    return max(0.0, hi / kb - 1.0, (1.0 - lo / kb) / 2.0)


def oracle_mm(g: Graph) -> int | None:
    try:
        return maximum_matching(g).size
    except OracleTooLarge:
        return None


def oracle_vc(g: Graph) -> tuple[int, str]:
    """Exact minimum cover size, or the maximal-matching lower bound when too large."""
    try:
        return exact_vertex_cover(g).size, "exact"
    except OracleTooLarge:
        return greedy_maximal_matching(g).size, "maximal-matching bound"


def coreset_cover(r: CoresetResult, strategy: str = "matched") -> VertexCover:
    """Fixed vertices plus a cover of the union (exact, or matched endpoints)."""
    if r.fixed is None:
        raise ValueError("vertex cover needs an EDCS coreset (it carries the fixed vertices)")
    union = r.union
    if strategy == "exact":
        inner = exact_vertex_cover(union)
    elif strategy == "matched":
        inner = VertexCover.of(greedy_maximal_matching(union).vertices)
    else:
        raise ValueError(f"unknown cover strategy {strategy!r}")
    return inner.union(r.fixed)


def compose_and_solve(r: CoresetResult, problem: str = "matching", solver: str = "auto",
                      instance: str = "", oracle: bool = True) -> ApproxReport:
    """Solve ``problem`` on the union and compare with the host's optimum.

    For ``"vertex_cover"``, ``solver`` picks the cover of the union:
    ``"exact"`` or ``"matched"`` (endpoints of a maximal matching).
    """
    rep = ApproxReport(instance, f"{r.kind}-coreset", r.seed or 0, resources=dict(r.resources))
    if problem == "matching":
        rep.matching_size = maximum_matching(r.union, solver).size
        if oracle:
            rep.oracle_mm = oracle_mm(r.host)
    elif problem == "vertex_cover":
        rep.cover_size = coreset_cover(r, "matched" if solver == "auto" else solver).size
        if oracle:
            rep.oracle_vc, rep.vc_kind = oracle_vc(r.host)
    else:
        raise ValueError(f"unknown problem {problem!r}")
    return rep


# -- lower-bound instance -----------------------------------------------------

LAYER_NAMES = ("L1", "L2", "R1", "R2")


def gen_lowerbound_graph(n: int, k: int) -> tuple[Graph, np.ndarray, np.ndarray]:
    """Bipartite instance on which arbitrary maximum-matching coresets lose half.

    Layers (ids in this order): ``L1`` with ``n/2 + n/k`` vertices, then
    ``L2``, ``R1``, ``R2`` with ``n/2`` each. ``L1 x R2`` is complete,
    ``L2[j] - R2[j]`` and ``L1[j] - R1[j]`` are matchings. The maximum
    matching has size ``n``.

    Returns ``(graph, bipartition, layer labels 0..3)``.
    """
    if k < 1 or n < 2 or n % (2 * k):
        raise GraphError(f"n must be a positive multiple of 2k, got n={n}, k={k}")
    h = n // 2
    a = h + n // k
    l1 = np.arange(a)
    l2 = a + np.arange(h)
    r1 = a + h + np.arange(h)
    r2 = a + 2 * h + np.arange(h)
    total = a + 3 * h
    labels = np.repeat(np.arange(4, dtype=np.int8), [a, h, h, h])
    sides = (labels >= 2).astype(np.int8)
    full = np.stack([np.repeat(l1, h), np.tile(r2, a)], axis=1)
    edges = np.concatenate([full, np.stack([l2, r2], 1), np.stack([l1[:h], r1], 1)])
    keys = edges[:, 0] * total + edges[:, 1]
    edges = edges[np.argsort(keys, kind="stable")]
    g = Graph._from_sorted(total, np.ascontiguousarray(edges), sides)
    return g, sides, labels


def adversarial_max_matching(part: Graph, labels) -> tuple[Matching, bool]:
    """A maximum matching of ``part`` avoiding ``L2 - R2`` edges when possible.

    Returns ``(matching, flagged)``; ``flagged`` is true when no maximum
    matching avoids those edges, so the true maximum was returned instead.
    """
    labels = np.asarray(labels)
    a, b = part.edges[:, 0], part.edges[:, 1]
    bad = (labels[a] == 1) & (labels[b] == 3)
    sides = (labels >= 2).astype(np.int8)
    best = hopcroft_karp(part, sides)
    avoid = hopcroft_karp(part.edge_subgraph(~bad), sides)
    if avoid.size == best.size:
        return avoid, False
    return best, True


def adversarial_coreset(g: Graph, labels, k: int, rng: Rng | int | None = None) -> CoresetResult:
    rng = as_rng(rng)
    ids, sizes = _partition(g, k, rng)
    parts, flagged = [], 0
    for pid in ids:
        m, flag = adversarial_max_matching(g.edge_subgraph(pid), labels)
        flagged += flag
        parts.append(np.sort(g.edge_ids(m.edges)))
    return CoresetResult(g, k, "adversarial-maxmatching", parts, sizes, seed=rng.seed,
                         flags={"flagged_parts": flagged})


def lowerbound_demo(n: int, k: int, rng: Rng | int | None = None,
                    edcs: EdcsParams = EdcsParams(40, 36)) -> dict:
    """Adversarial maximum-matching coreset vs EDCS coreset on the lower-bound instance.

    Both coresets see the same random partition (child stream 0).
    """
    rng = as_rng(rng)
    g, _, labels = gen_lowerbound_graph(n, k)
    adv = adversarial_coreset(g, labels, k, rng)
    ec = edcs_coreset(g, CoresetParams(k, edcs), rng)
    adv_mm = hopcroft_karp(adv.union).size
    edcs_mm = hopcroft_karp(ec.union).size
    return {
        "n": n,
        "k": k,
        "mm": n,
        "maxmatching_mm": adv_mm,
        "edcs_mm": edcs_mm,
        "maxmatching_ratio": adv_mm / n,
        "edcs_ratio": edcs_mm / n,
        "flagged_parts": adv.flags["flagged_parts"],
        "k_within_hypothesis": k <= n / (40 * math.log(n)),
    }


# -- serialization ------------------------------------------------------------

def save_coreset(r: CoresetResult, directory: str | os.PathLike, extra: dict | None = None) -> Path:
    """Write ``part_<i>.txt`` per coreset, ``union.txt`` and ``manifest.json``."""
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    for i in range(r.k):
        write_graph(r.coreset(i), out / f"part_{i}.txt")
    write_graph(r.union, out / "union.txt")
    manifest = {
        "kind": r.kind,
        "k": r.k,
        "seed": r.seed,
        "params": r.params.as_dict() if r.params else None,
        "coreset_sizes": [int(len(p)) for p in r.parts],
        "part_sizes": [int(x) for x in r.part_sizes],
        "union_size": int(r.union_mask.sum()),
        "fixed_vertices": None if r.fixed is None else [int(v) for v in r.fixed],
        **r.resources,
        **(extra or {}),
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return out
