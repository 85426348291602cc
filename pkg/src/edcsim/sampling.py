"""Edge/vertex sampling and random k-partitions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import Graph
from .rng import Rng, as_rng


def _check_p(p: float) -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"sampling probability must lie in [0, 1], got {p}")
    return p


def edge_sample(g: Graph, p: float, rng: Rng | int | None = None) -> Graph:
    """Keep each edge independently with probability ``p``.

    One uniform draw is made per edge in edge-id order, so two calls with the
    same seed are coupled: the larger ``p`` keeps a superset of edges.
    """
    p = _check_p(p)
    draws = as_rng(rng).random(g.m)
    return g.edge_subgraph(draws < p)


def vertex_sample(g: Graph, p: float, rng: Rng | int | None = None) -> tuple[Graph, np.ndarray]:
    """Keep each vertex with probability ``p``; return the induced subgraph and kept ids."""
    p = _check_p(p)
    kept = as_rng(rng).random(g.n) < p
    return g.induced(kept), np.flatnonzero(kept)


@dataclass(frozen=True)
class Partition:
    """Assignment of every host edge to one of ``k`` parts."""

    host: Graph
    k: int
    part_of: np.ndarray

    def part_ids(self, i: int) -> np.ndarray:
        return np.flatnonzero(self.part_of == i)

    def part(self, i: int) -> Graph:
        return self.host.edge_subgraph(self.part_of == i)

    def parts(self) -> list[Graph]:
        return [self.part(i) for i in range(self.k)]

    def sizes(self) -> np.ndarray:
        return np.bincount(self.part_of, minlength=self.k)


def random_k_partition(g: Graph, k: int, rng: Rng | int | None = None) -> Partition:
    """Send each edge to a part drawn uniformly from ``[0, k)``."""
    k = int(k)
    if k < 1:
        raise ValueError(f"part count must be at least 1, got {k}")
    part_of = as_rng(rng).integers(0, k, size=g.m).astype(np.int64)
    part_of.setflags(write=False)
    return Partition(g, k, part_of)
