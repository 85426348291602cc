"""Single-pass random-arrival streaming built on per-piece coresets."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .coreset import oracle_mm
from .edcs import EdcsParams, construct_edcs
from .graph import Graph
from .matching import maximum_matching
from .report import ApproxReport
from .rng import Rng, as_rng


class EdgeStream:
    """Forward-only reader over a random arrival order of the host edges."""

    def __init__(self, g: Graph, rng: Rng):
        self._order = rng.permutation(g.m).astype(np.int64)
        self._pos = 0

    @property
    def consumed(self) -> int:
        return self._pos

    def take(self, count: int) -> np.ndarray:
        chunk = self._order[self._pos:self._pos + count]
        self._pos += len(chunk)
        return chunk

    def exhausted(self) -> bool:
        return self._pos >= len(self._order)


def piece_count(m: int, s_target: int) -> int:
    return max(1, math.ceil(math.sqrt(m / s_target) - 1e-12)) if m else 1


@dataclass
class StreamResult:
    union: Graph
    report: ApproxReport
    peak_space: int
    k: int
    piece_sizes: list[int]
    consumed: int

    def space_bound(self, beta: int) -> float:
        """Buffer plus accumulated coresets: ``m/k + k n beta / 2``."""
        g = self.union
        m = sum(self.piece_sizes)
        return m / self.k + self.k * g.n * beta / 2


def stream_coreset(g: Graph, s_target: int, params: EdcsParams | None = None,
                   rng: Rng | int | None = None, variant: str = "edcs",
                   solver: str = "auto", oracle: bool = True, instance: str = "") -> StreamResult:
    """Read a uniformly permuted edge stream in ``k = ceil(sqrt(m / s_target))`` pieces.

    Each piece (``m // k`` edges, the last one takes the remainder) is
    buffered, summarized by an EDCS or a maximum matching, and dropped. The
    final matching is solved on the union of the summaries. Space is metered
    in edges held: the current buffer plus everything kept so far.
    """
    if s_target < g.n:
        raise ValueError(f"s_target {s_target} must be at least n = {g.n}")
    if variant == "edcs" and params is None:
        raise ValueError("the edcs variant needs EDCS parameters")
    if variant not in ("edcs", "maxmatching"):
        raise ValueError(f"unknown stream variant {variant!r}")
    rng = as_rng(rng)
    k = piece_count(g.m, s_target)
    stream = EdgeStream(g, rng.child(0))
    base = g.m // k
    kept = np.zeros(g.m, dtype=bool)
    held = 0
    peak = 0
    sizes = []
    for i in range(k):
        ids = np.sort(stream.take(base if i < k - 1 else g.m - stream.consumed))
        sizes.append(len(ids))
        peak = max(peak, held + len(ids))
        piece = g.edge_subgraph(ids)
        if variant == "edcs":
            e, _ = construct_edcs(piece, params, rng=rng.child(i + 1), record=False)
            chosen = ids[e.in_h]
        else:
            chosen = np.sort(g.edge_ids(maximum_matching(piece, solver).edges))
        kept[chosen] = True
        held += len(chosen)
        peak = max(peak, held)
    union = g.edge_subgraph(kept)
    rep = ApproxReport(instance, f"stream-{variant}", rng.seed,
                       matching_size=maximum_matching(union, solver).size,
                       oracle_mm=oracle_mm(g) if oracle else None,
                       resources={"k": k, "peak_space": peak, "union_edges": union.m})
    return StreamResult(union, rep, peak, k, sizes, stream.consumed)
