"""Simulated MPC runtime hosting the parallel EDCS matching/vertex-cover algorithm.

Machines are not real processes. Each primitive charges a fixed number of
synchronous rounds and records, per round, the load (edge units) of every
machine involved plus the message volume. A load above the memory budget is
recorded as a violation and the run continues.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from ._kernels import unique_endpoint_edges
from .edcs import EdcsParams, construct_edcs
from .graph import Graph, Multigraph
from .hashing import membership_matrix
from .matching import Matching, VertexCover, greedy_maximal_matching
from .rng import Rng

# expected machine load p^2 * n * Delta / 2 equals MEMORY_CONSTANT * s * ln(n)^2
# at the theory sampling rate p = 200 ln n sqrt(s / (n Delta))
MEMORY_CONSTANT = 200 ** 2 / 2

ROUNDS_PARALLEL_EDCS = 3
ROUNDS_RANDOM_MATCH = 3
ROUNDS_BASE = 2

PRACTICE_BASE_THRESHOLD = 16


def _ln(n: int) -> float:
    return math.log(max(n, 3))


def theory_base_threshold(n: int) -> float:
    """``400 ln^12 n``: far beyond any desk-scale degree."""
    return 400 * _ln(n) ** 12


@dataclass(frozen=True)
class MpcConfig:
    """Simulation settings.

    Attributes:
        s: per-machine memory parameter in edge units; ``None`` uses ``n``.
        machines: machine budget per round; ``None`` is unlimited.
        mode: ``"theory"`` (sampling schedule from the analysis) or
            ``"practice"`` (desk-scale schedule, see :meth:`PedcsParams.practice`).
        overrides: practice-schedule overrides (``p``, ``k``, ``beta``,
            ``kappa``, ``lam``, ``lam_c``, ``replication``).
    """

    s: int | None = None
    machines: int | None = None
    mode: str = "practice"
    seed: int = 0
    base_threshold: float | None = None
    memory_constant: float = MEMORY_CONSTANT
    average_degree: bool = False
    overrides: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.mode not in ("theory", "practice"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.s is not None and self.s < 1:
            raise ValueError("memory parameter s must be at least 1")
        unknown = set(self.overrides) - {"p", "k", "beta", "kappa", "lam", "lam_c", "replication"}
        if unknown:
            raise ValueError(f"unknown schedule overrides {sorted(unknown)}")


@dataclass
class RoundRecord:
    name: str
    machine_loads: list[int]
    messages: int


@dataclass
class MpcTrace:
    """Per-round meters. ``violations`` holds only memory/machine-budget
    overruns; other recorded events (EDCS leaks, degree guards) go to ``notes``."""

    rounds: list[RoundRecord] = field(default_factory=list)
    violations: list[dict] = field(default_factory=list)
    notes: list[dict] = field(default_factory=list)

    @property
    def round_count(self) -> int:
        return len(self.rounds)

    @property
    def peak_memory(self) -> int:
        return max((max(r.machine_loads, default=0) for r in self.rounds), default=0)

    @property
    def messages(self) -> int:
        return sum(r.messages for r in self.rounds)

    def to_json(self) -> dict:
        return {
            "rounds": self.round_count,
            "per_round": [{"name": r.name, "machine_loads": list(r.machine_loads),
                           "messages": r.messages} for r in self.rounds],
            "violations": list(self.violations),
            "notes": list(self.notes),
        }


class MpcRun:
    """Owns the meters and the random stream of one simulated execution."""

    def __init__(self, config: MpcConfig | None = None, n: int | None = None):
        self.config = config or MpcConfig()
        self.trace = MpcTrace()
        self.rng = Rng(self.config.seed)
        self._streams = 0
        self.n = n
        self.iterations = 0

    def bind(self, g: Graph) -> None:
        if self.n is None:
            self.n = g.n

    @property
    def s(self) -> int:
        return self.config.s if self.config.s is not None else max(self.n or 1, 1)

    @property
    def budget(self) -> float:
        """Per-machine load limit ``c * s * ln(n)^2``."""
        return self.config.memory_constant * self.s * _ln(self.n or 1) ** 2

    @property
    def base_threshold(self) -> float:
        if self.config.base_threshold is not None:
            return self.config.base_threshold
        if self.config.mode == "theory":
            return theory_base_threshold(self.n or 1)
        return PRACTICE_BASE_THRESHOLD

    def stream(self) -> Rng:
        """A fresh child stream; call order fixes the randomness of a run."""
        self._streams += 1
        return self.rng.child(self._streams)

    def charge(self, name: str, loads, messages: int) -> None:
        loads = [int(x) for x in loads]
        index = len(self.trace.rounds)
        budget = self.budget
        for machine, load in enumerate(loads):
            if load > budget:
                self.trace.violations.append({"round": index, "name": name, "machine": machine,
                                              "load": load, "budget": budget})
        cap = self.config.machines
        if cap is not None and len(loads) > cap:
            self.trace.violations.append({"round": index, "name": name, "machines": len(loads),
                                          "budget_machines": cap})
        self.trace.rounds.append(RoundRecord(name, loads, int(messages)))

    def note(self, kind: str, **info) -> None:
        self.trace.notes.append({"kind": kind, **info})


# -- ParallelEDCS ----------------------------------------------------------------

@dataclass(frozen=True)
class PedcsParams:
    """Sampling and EDCS parameters of one ParallelEDCS call.

    Each vertex joins machine ``i`` iff its hash of ``i`` over ``[0, hash_range)``
    is zero, so the realized sampling rate is ``1 / hash_range``.
    """

    p: float
    hash_range: int
    k: int
    kappa: int
    lam: float
    beta: int
    lam_c: float

    @property
    def p_real(self) -> float:
        return 1.0 / self.hash_range

    @property
    def local(self) -> EdcsParams:
        return EdcsParams.from_lambda(self.beta, self.lam)

    @property
    def beta_c(self) -> float:
        return self.p_real * self.k * (1 + self.lam_c) * self.beta

    @property
    def beta_minus_c(self) -> float:
        return self.p_real * self.k * (1 - self.lam_c) * self.beta

    def composed(self) -> EdcsParams:
        hi = math.floor(self.beta_c + 1e-9)
        lo = max(0, math.ceil(self.beta_minus_c - 1e-9))
        return EdcsParams(hi, min(lo, hi - 1))

    @staticmethod
    def _range(p: float) -> int:
        return max(1, int(round(1.0 / p)))

    @classmethod
    def theory(cls, n: int, delta: float, s: int) -> "PedcsParams":
        ln = _ln(n)
        p = min(1.0, 200 * ln * math.sqrt(s / (n * max(delta, 1))))
        r = cls._range(p)
        k = math.ceil(800 * ln * r * r)
        lam = (2 * ln) ** -3
        beta = math.ceil(750 * lam ** -2 * ln)
        return cls(p, r, k, math.ceil(20 * ln), lam, beta, math.sqrt(lam) * ln)

    @classmethod
    def practice(cls, delta: float, replication: float = 4.0, p: float | None = None,
                 k: int | None = None, beta: int | None = None, kappa: int = 16,
                 lam: float = 0.1, lam_c: float = 0.15) -> "PedcsParams":
        """Desk-scale schedule.

        ``beta`` defaults to ``max(4, ceil(delta^(1/3)))`` and ``p`` to
        ``replication * beta / (2 delta^(2/3))`` so that the composed degree
        ``p k beta`` lands near ``2 delta^(2/3)``. ``k`` is chosen so each edge
        is expected on ``p^2 k = replication`` machines.
        """
        delta = max(float(delta), 1.0)
        beta = beta if beta is not None else max(4, math.ceil(delta ** (1 / 3) - 1e-9))
        if p is None:
            p = min(1.0, replication * beta / (2 * delta ** (2 / 3)))
        r = cls._range(p)
        if k is None:
            k = max(1, math.ceil(replication * r * r - 1e-9))
        return cls(p, r, int(k), int(kappa), lam, int(beta), lam_c)

    def as_dict(self) -> dict:
        d = asdict(self)
        d.update(p_real=self.p_real, beta_c=self.beta_c, beta_minus_c=self.beta_minus_c)
        return d


def schedule(run: MpcRun, delta: float) -> PedcsParams:
    if run.config.mode == "theory":
        return PedcsParams.theory(run.n, delta, run.s)
    return PedcsParams.practice(delta, **run.config.overrides)


@dataclass
class PedcsResult:
    c: Multigraph
    params: PedcsParams
    uncovered: int
    machine_edges: np.ndarray
    machine_coreset: np.ndarray
    counts: np.ndarray

    def local_parts(self):
        return self.machine_coreset


def parallel_edcs(run: MpcRun, g: Graph, delta: float, params: PedcsParams | None = None,
                  rng: Rng | None = None) -> PedcsResult:
    """Vertex-sampled subgraphs on ``k`` machines, a local EDCS on each, multigraph union.

    Machine-local EDCS construction is deterministic (edge-id order), so
    machines holding identical subgraphs return identical EDCSs; with
    ``hash_range == 1`` every machine holds ``g`` and the EDCS is computed once.
    """
    run.bind(g)
    params = params or schedule(run, delta)
    rng = rng or run.stream()
    if run.config.mode == "theory" and delta < (run.n / run.s) * theory_base_threshold(run.n):
        run.note("below-theory-degree-guard", delta=float(delta))
    local = params.local
    k = params.k
    counts = np.zeros(g.m, dtype=np.int64)
    covered = np.zeros(g.m, dtype=bool)
    loads = np.zeros(k, dtype=np.int64)
    sizes = np.zeros(k, dtype=np.int64)
    if g.m:
        if params.hash_range == 1:
            e, _ = construct_edcs(g, local, record=False)
            counts[:] = k * e.in_h
            covered[:] = True
            loads[:] = g.m
            sizes[:] = e.size
        else:
            member = membership_matrix(g.n, k, params.kappa, params.hash_range, rng)
            a, b = g.edges[:, 0], g.edges[:, 1]
            for i in range(k):
                mask = member[a, i] & member[b, i]
                ids = np.flatnonzero(mask)
                loads[i] = len(ids)
                if not len(ids):
                    continue
                covered |= mask
                e, _ = construct_edcs(g.edge_subgraph(ids), local, record=False)
                counts[ids[e.in_h]] += 1
                sizes[i] = e.size
    # route edges to machines, build local EDCSs, annotate the union
    run.charge("pedcs-route", loads, 2 * g.m + int(loads.sum()))
    run.charge("pedcs-local", loads, 0)
    run.charge("pedcs-annotate", loads, int(sizes.sum()))
    uncovered = int(g.m - covered.sum())
    return PedcsResult(Multigraph.from_edge_counts(g, counts), params, uncovered, loads, sizes,
                       counts)


def fitted_composed(host: Graph, c, multiplicity: bool = False) -> tuple[float, float]:
    """Best ``(B, lam)`` with ``C`` an EDCS of ``host`` at ``(B(1 + lam), B(1 - lam))``.

    Degrees come from the deduplicated support unless ``multiplicity`` is set.
    The optimum centers ``B`` between the largest degree sum on ``C`` edges
    and the smallest on the remaining host edges.
    """
    deg = c.degrees if multiplicity else c.support.degrees
    in_c = np.zeros(host.m, dtype=bool)
    in_c[host.edge_ids(c.edges)] = True
    sums = deg[host.edges[:, 0]] + deg[host.edges[:, 1]]
    hi = float(sums[in_c].max()) if in_c.any() else 0.0
    lo = float(sums[~in_c].min()) if (~in_c).any() else hi
    if lo >= hi:
        return hi, 0.0
    return (hi + lo) / 2, (hi - lo) / (hi + lo)


# -- RandomMatch -------------------------------------------------------------------

def _weighted_pick(src: np.ndarray, weight: np.ndarray, draws: np.ndarray):
    """For each distinct ``src`` value, index of one entry chosen with prob. prop. to weight."""
    order = np.argsort(src, kind="stable")
    s = src[order]
    w = weight[order]
    starts = np.flatnonzero(np.r_[True, s[1:] != s[:-1]])
    cum = np.cumsum(w)
    base = np.r_[0, cum[starts[1:] - 1]]
    total = np.r_[cum[starts[1:] - 1], cum[-1]] - base
    target = base + np.floor(draws[: len(starts)] * total).astype(np.int64)
    pos = np.searchsorted(cum, target, side="right")
    return order[pos]


def random_match(run: MpcRun | None, g, s_vertices, delta: float,
                 rng: Rng | None = None) -> Matching:
    """One-shot matching incident on ``s_vertices``.

    Half of ``s_vertices`` (independently) each pick a uniform incident edge
    leaving the sampled half; picked edges whose endpoints are picked exactly
    once form the matching. ``g`` may be a :class:`Multigraph`, in which case
    degrees and the uniform choice count multiplicity.

    Raises:
        ValueError: a vertex of ``s_vertices`` has degree below ``delta / 3``.
    """
    if isinstance(g, Multigraph):
        support, mult, deg = g.support, g.multiplicity, g.degrees
    else:
        support, mult, deg = g, np.ones(g.m, dtype=np.int64), g.degrees
    s_vertices = np.unique(np.asarray(s_vertices, dtype=np.int64))
    low = s_vertices[3 * deg[s_vertices] < delta]
    if len(low):
        v = int(low[0])
        raise ValueError(f"vertex {v} has degree {int(deg[v])} < delta/3 = {delta / 3:.3f}")
    if rng is None:
        rng = run.stream() if run is not None else Rng(0)
    keep = rng.random(len(s_vertices)) < 0.5
    in_sp = np.zeros(support.n, dtype=bool)
    in_sp[s_vertices[keep]] = True
    a, b = support.edges[:, 0], support.edges[:, 1]
    out_a = in_sp[a] & ~in_sp[b]
    out_b = in_sp[b] & ~in_sp[a]
    src = np.concatenate([a[out_a], b[out_b]])
    dst = np.concatenate([b[out_a], a[out_b]])
    w = np.concatenate([mult[out_a], mult[out_b]])
    draws = rng.random(int(in_sp.sum()))
    if len(src):
        pick = _weighted_pick(src, w, draws)
        pu, pv = src[pick], dst[pick]
        sel = unique_endpoint_edges(support.n, pu, pv)
        m = Matching.from_pairs(np.stack([pu[sel], pv[sel]], axis=1))
    else:
        pu = np.empty(0, dtype=np.int64)
        m = Matching.from_pairs([])
    if run is not None:
        loads = [int(support.m)]
        run.charge("match-sample", loads, 2 * int(support.m))
        run.charge("match-mark", loads, len(pu))
        run.charge("match-join", loads, len(pu))
    return m


# -- ParallelAlgorithm ---------------------------------------------------------------

@dataclass
class LevelInfo:
    delta: float
    max_degree: int
    edges: int
    coreset_edges: int
    high: int
    matched_high: int
    leaks: int
    uncovered: int
    params: dict

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass
class ParallelResult:
    cover: VertexCover
    matching: Matching
    trace: MpcTrace
    levels: list[LevelInfo]
    base_delta: float

    @property
    def depth(self) -> int:
        return len(self.levels)

    def __iter__(self):
        return iter((self.cover, self.matching, self.trace))


MAX_LEVELS = 64


def _base_case(run: MpcRun, g: Graph) -> Matching:
    run.charge("base-ship", [g.m], g.m)
    m = greedy_maximal_matching(g)
    run.charge("base-solve", [g.m], m.size)
    return m


def parallel_algorithm(run: MpcRun, g: Graph, delta: float | None = None) -> ParallelResult:
    """Recursive EDCS-based matching and vertex cover.

    Each level computes a ParallelEDCS multigraph ``C``, takes the vertices of
    ``C``-degree at least ``beta_minus_C / 2`` into the cover, matches some of
    them with :func:`random_match` and recurses on the rest of ``C``. Below the
    base threshold a maximal matching finishes the job.

    Host edges outside ``C`` whose endpoints both stay in the recursion are
    added to the residual graph (counted as ``leaks``); with a valid EDCS there
    are none, and the returned cover is always feasible.
    """
    run.bind(g)
    delta = float(g.max_degree if delta is None else delta)
    if delta < g.max_degree:
        raise ValueError(f"delta {delta} is below the maximum degree {g.max_degree}")
    cover = np.zeros(g.n, dtype=bool)
    matched: list[np.ndarray] = []
    levels: list[LevelInfo] = []
    current = g
    while delta > run.base_threshold and current.m and len(levels) < MAX_LEVELS:
        rng = run.stream()
        sample_delta = current.m / max(current.n, 1) if run.config.average_degree else delta
        res = parallel_edcs(run, current, max(sample_delta, 1.0), rng=rng.child(0))
        c, params = res.c, res.params
        high = np.flatnonzero(2 * c.degrees >= params.beta_minus_c)
        m_high = random_match(run, c, high, params.beta_c, rng=rng.child(1))
        removed = np.zeros(g.n, dtype=bool)
        removed[high] = True
        removed[m_high.vertices] = True
        keep = ~removed
        in_c = np.zeros(current.m, dtype=bool)
        in_c[current.edge_ids(c.edges)] = True
        inside = current.edge_mask_within(keep)
        leaks = int((inside & ~in_c).sum())
        nxt = current.edge_subgraph(inside)
        cover |= removed
        matched.append(m_high.edges)
        levels.append(LevelInfo(delta, current.max_degree, current.m, c.support.m, len(high),
                                m_high.size, leaks, res.uncovered, params.as_dict()))
        if leaks:
            run.note("edcs-leak", level=len(levels) - 1, edges=leaks)
        new_delta = float(nxt.max_degree)
        if new_delta >= delta:
            run.note("degree-not-decreasing", level=len(levels) - 1, before=delta, after=new_delta)
        current, delta = nxt, new_delta
    base = _base_case(run, current)
    cover[base.vertices] = True
    matched.append(base.edges)
    m = Matching.from_pairs(np.concatenate(matched))
    return ParallelResult(VertexCover.of(np.flatnonzero(cover)), m, run.trace, levels, delta)


def depth_bound(delta: float) -> int:
    """``ceil(log_{3/2} log2 delta) + 2``."""
    if delta <= 2:
        return 2
    return math.ceil(math.log(math.log2(delta), 1.5)) + 2


def iterations_for(eps: float, alpha: float = 8.0) -> int:
    if not 0 < eps < 1:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    return max(1, math.ceil(alpha * math.log(1 / eps) - 1e-9))


def iterate_matching(run: MpcRun, g: Graph, eps: float, alpha: float = 8.0) -> Matching:
    """Repeat the parallel algorithm on the graph left after removing matched vertices.

    Runs ``max(1, ceil(alpha ln(1/eps)))`` times, stopping early once no
    edge remains.
    """
    run.bind(g)
    total = iterations_for(eps, alpha)
    residual = g
    parts = []
    used = 0
    for _ in range(total):
        if residual.m == 0:
            break
        res = parallel_algorithm(run, residual)
        used += 1
        parts.append(res.matching.edges)
        gone = np.zeros(g.n, dtype=bool)
        gone[res.matching.vertices] = True
        residual = residual.without_vertices(gone)
    run.iterations = used
    return Matching.from_pairs(np.concatenate(parts) if parts else [])


def account(run: MpcRun) -> dict:
    t = run.trace
    return {"rounds": t.round_count, "peak_memory": t.peak_memory, "messages": t.messages,
            "violations": list(t.violations), "notes": list(t.notes)}


def write_trace(run: MpcRun, path: str | os.PathLike) -> None:
    Path(path).write_text(json.dumps(run.trace.to_json(), sort_keys=True) + "\n")
