"""Command-line experiment driver.

    edcsim run --experiment coreset-matching --seeds 0..9 --out rows.csv
    edcsim gen bipartite 300 300 0.1 --seed 3 --out g.txt
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from .coreset import (CoresetParams, coreset_cover, compose_and_solve, edcs_coreset,
                      fitted_lambda, gen_lowerbound_graph, lowerbound_demo, maxmatching_coreset)
from .edcs import EdcsParams, construct_edcs, degree_gap, validate_edcs
from .generators import (gen_cycle, gen_path, gen_petersen, gen_random_bipartite,
                         gen_random_graph, gen_regular_ish)
from .graph import Graph, GraphError
from .io import format_graph
from .matching import (greedy_maximal_matching, hopcroft_karp, is_cover, is_matching,
                       maximum_matching)
from .mpc import MpcConfig, MpcRun, depth_bound, iterate_matching, parallel_algorithm
from .report import UNAVAILABLE
from .rng import Rng
from .sampling import edge_sample
from .streaming import stream_coreset


class ConfigError(ValueError):
    pass


# -- config ---------------------------------------------------------------------------

def parse_config(text: str, source: str = "<config>") -> dict[str, str]:
    """Flat ``key=value`` lines; blank lines and ``#`` comments are skipped."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key or not value:
            raise ConfigError(f"{source}:{lineno}: expected key=value, got {raw.strip()!r}")
        out[key] = value
    return out


def _coerce(default, raw: str, key: str):
    try:
        if isinstance(default, bool):
            if raw.lower() not in ("true", "false", "1", "0"):
                raise ValueError
            return raw.lower() in ("true", "1")
        if isinstance(default, int):
            return int(raw)
        if isinstance(default, float):
            return float(raw)
    except ValueError:
        raise ConfigError(f"config key {key!r}: cannot read {raw!r} as "
                          f"{type(default).__name__}") from None
    return raw


def resolve(defaults: dict, given: dict[str, str]) -> dict:
    unknown = sorted(set(given) - set(defaults))
    if unknown:
        raise ConfigError(f"unknown config keys {unknown}; known: {sorted(defaults)}")
    cfg = dict(defaults)
    for key, raw in given.items():
        cfg[key] = _coerce(defaults[key], raw, key)
    return cfg


def parse_seeds(text: str) -> list[int]:
    lo, sep, hi = text.partition("..")
    try:
        a = int(lo)
        b = int(hi) if sep else a
    except ValueError:
        raise ConfigError(f"seed range must look like 'a..b', got {text!r}") from None
    if b < a:
        raise ConfigError(f"empty seed range {text!r}")
    return list(range(a, b + 1))


# -- experiments ------------------------------------------------------------------------

@dataclass
class Context:
    mode: str = "practice"
    s: int | None = None
    base_threshold: float | None = None
    alpha: float = 8.0
    traces: dict | None = None


@dataclass(frozen=True)
class Experiment:
    run: Callable[[dict, int, Context], list[dict]]
    defaults: dict
    columns: tuple[str, ...]


def _bip(cfg, seed):
    g = gen_random_bipartite(cfg["n_left"], cfg["n_right"], cfg["p"], Rng(seed))
    return g, f"bip({cfg['n_left']},{cfg['n_right']},{cfg['p']})"


def _fixture(cfg, seed) -> tuple[Graph, str]:
    name = cfg["instance"]
    if name == "triangle":
        return gen_cycle(3), "triangle"
    if name == "petersen":
        return gen_petersen(), "petersen"
    if name == "path":
        return gen_path(cfg["n"]), f"path({cfg['n']})"
    if name == "er":
        return gen_random_graph(cfg["n"], cfg["p"], Rng(seed)), f"er({cfg['n']},{cfg['p']})"
    if name == "regular":
        return gen_regular_ish(cfg["n"], cfg["d"], Rng(seed)), f"regular({cfg['n']},{cfg['d']})"
    raise ConfigError(f"unknown instance {name!r}")


def exp_edcs_validate(cfg, seed, ctx):
    g, inst = _fixture(cfg, seed)
    params = EdcsParams(cfg["beta"], cfg["beta_minus"])
    e, trace = construct_edcs(g, params, start=cfg["start"], order=cfg["order"], rng=Rng(seed))
    bad = validate_edcs(e)
    bound = 2 * g.n * params.beta ** 2
    violations = len(bad) + (not trace.strictly_increasing) + (trace.steps > bound)
    return [{"instance": inst, "seed": seed, "n": g.n, "m": g.m, "beta": params.beta,
             "beta_minus": params.beta_minus, "order": cfg["order"], "start": cfg["start"],
             "steps": trace.steps, "step_bound": bound, "edcs_edges": e.size,
             "phi_increasing": trace.strictly_increasing, "violations": violations}]


def exp_ddl_gap(cfg, seed, ctx):
    n = cfg["n"]
    g = gen_random_graph(n, cfg["avg_degree"] / (n - 1), Rng(seed))
    params = EdcsParams.from_lambda(cfg["beta"], cfg["lam"])
    a, _ = construct_edcs(g, params, order="queue", rng=Rng(seed).child(1))
    b, _ = construct_edcs(g, params, order="scan", rng=Rng(seed).child(2))
    gap = degree_gap(a, b)
    bound = math.log(n) * math.sqrt(params.lam) * params.beta
    return [{"instance": f"er({n},avg{cfg['avg_degree']})", "seed": seed, "m": g.m,
             "beta": params.beta, "beta_minus": params.beta_minus, "gap": gap, "bound": bound,
             "within_bound": gap <= bound,
             "violations": len(validate_edcs(a)) + len(validate_edcs(b))}]


def _coreset_params(cfg):
    return CoresetParams.practice(cfg["k"], cfg["beta"], cfg["beta_minus"], cfg["eps"])


def exp_coreset_matching(cfg, seed, ctx):
    g, inst = _bip(cfg, seed)
    r = edcs_coreset(g, _coreset_params(cfg), Rng(seed))
    rep = compose_and_solve(r, "matching", instance=inst)
    union = r.union
    bad = int(not np.isin(union.keys, g.keys).all())
    return [{"instance": inst, "seed": seed, "m": g.m, "k": r.k, "union_edges": union.m,
             "max_coreset_edges": r.resources["max_coreset_edges"],
             "matching": rep.matching_size, "oracle_mm": rep.oracle_mm,
             "ratio": rep.matching_ratio, "fitted_lambda": fitted_lambda(r), "violations": bad}]


def exp_coreset_vc(cfg, seed, ctx):
    g, inst = _bip(cfg, seed)
    r = edcs_coreset(g, _coreset_params(cfg), Rng(seed))
    cover = coreset_cover(r, cfg["cover"])
    lower = greedy_maximal_matching(g).size
    feasible = is_cover(g, cover)
    return [{"instance": inst, "seed": seed, "m": g.m, "cover": cover.size,
             "fixed": len(r.fixed), "maximal_matching": lower,
             "ratio_to_bound": cover.size / lower if lower else 1.0,
             "feasible": feasible, "violations": int(not feasible)}]


def exp_maxmatching_coreset(cfg, seed, ctx):
    g, inst = _bip(cfg, seed)
    r = maxmatching_coreset(g, cfg["k"], Rng(seed))
    rep = compose_and_solve(r, "matching", instance=inst)
    bad = sum(not is_matching(g, maximum_matching(r.coreset(i))) for i in range(r.k))
    return [{"instance": inst, "seed": seed, "m": g.m, "k": r.k, "union_edges": r.union.m,
             "matching": rep.matching_size, "oracle_mm": rep.oracle_mm,
             "ratio": rep.matching_ratio, "violations": bad}]


def exp_lowerbound_demo(cfg, seed, ctx):
    d = lowerbound_demo(cfg["n"], cfg["k"], Rng(seed), EdcsParams(cfg["beta"], cfg["beta_minus"]))
    return [{"instance": f"lowerbound({cfg['n']},{cfg['k']})", "seed": seed,
             "mm": d["mm"], "maxmatching_mm": d["maxmatching_mm"], "edcs_mm": d["edcs_mm"],
             "maxmatching_ratio": d["maxmatching_ratio"], "edcs_ratio": d["edcs_ratio"],
             "flagged_parts": d["flagged_parts"], "k_within_hypothesis": d["k_within_hypothesis"],
             "violations": 0}]


def _mpc_run(ctx: Context, seed: int) -> MpcRun:
    return MpcRun(MpcConfig(s=ctx.s, mode=ctx.mode, seed=seed, base_threshold=ctx.base_threshold))


def exp_mpc_full(cfg, seed, ctx):
    g = gen_regular_ish(cfg["n"], cfg["d"], Rng(seed))
    run = _mpc_run(ctx, seed)
    res = parallel_algorithm(run, g)
    feasible = is_matching(g, res.matching) and is_cover(g, res.cover)
    deltas = [lvl.delta for lvl in res.levels] + [res.base_delta]
    decreasing = all(a > b for a, b in zip(deltas, deltas[1:]))
    if ctx.traces is not None:
        ctx.traces[str(seed)] = run.trace.to_json()
    m = res.matching.size
    return [{"instance": f"regular({cfg['n']},{cfg['d']})", "seed": seed, "m": g.m,
             "matching": m, "cover": res.cover.size,
             "cover_per_match": res.cover.size / m if m else 0.0, "depth": res.depth,
             "depth_bound": depth_bound(g.max_degree), "delta_decreasing": decreasing,
             "leaks": sum(lvl.leaks for lvl in res.levels), "rounds": run.trace.round_count,
             "peak_memory": run.trace.peak_memory, "messages": run.trace.messages,
             "memory_violations": len(run.trace.violations), "feasible": feasible,
             "violations": int(not feasible) + len(run.trace.violations)}]


def exp_mpc_iterate(cfg, seed, ctx):
    g, inst = _bip(cfg, seed)
    run = _mpc_run(ctx, seed)
    m = iterate_matching(run, g, cfg["eps"], ctx.alpha)
    mm = hopcroft_karp(g).size
    if ctx.traces is not None:
        ctx.traces[str(seed)] = run.trace.to_json()
    ok = is_matching(g, m)
    return [{"instance": inst, "seed": seed, "m": g.m, "eps": cfg["eps"], "alpha": ctx.alpha,
             "iterations": run.iterations, "matching": m.size, "oracle_mm": mm,
             "ratio": m.size / mm if mm else 1.0, "rounds": run.trace.round_count,
             "memory_violations": len(run.trace.violations),
             "violations": int(not ok) + len(run.trace.violations)}]


def exp_stream(cfg, seed, ctx):
    g, inst = _bip(cfg, seed)
    params = EdcsParams(cfg["beta"], cfg["beta_minus"])
    s_target = cfg["s_target"] or g.n
    r = stream_coreset(g, s_target, params, Rng(seed), cfg["variant"], instance=inst)
    bound = g.m / r.k + r.k * g.n * params.beta / 2
    within = r.peak_space <= 1.1 * bound
    return [{"instance": inst, "seed": seed, "m": g.m, "variant": cfg["variant"], "k": r.k,
             "union_edges": r.union.m, "matching": r.report.matching_size,
             "oracle_mm": r.report.oracle_mm, "ratio": r.report.matching_ratio,
             "peak_space": r.peak_space, "space_bound": bound, "within_space": within,
             "violations": int(r.consumed != g.m)}]


def exp_concentration_demo(cfg, seed, ctx):
    g, inst = _bip(cfg, seed)
    mm = hopcroft_karp(g).size
    sizes = np.array([hopcroft_karp(edge_sample(g, cfg["sample_p"], Rng(seed).child(t))).size
                      for t in range(cfg["samples"])], dtype=float)
    return [{"instance": inst, "seed": seed, "mm": mm, "sample_p": cfg["sample_p"],
             "samples": cfg["samples"], "mean_sample_mm": sizes.mean(),
             "std_sample_mm": sizes.std(ddof=1) if len(sizes) > 1 else 0.0,
             "scale": math.sqrt(mm * cfg["sample_p"]), "violations": 0}]


_BIP = {"n_left": 200, "n_right": 200, "p": 0.1}

EXPERIMENTS: dict[str, Experiment] = {
    "edcs-validate": Experiment(
        exp_edcs_validate,
        {"instance": "triangle", "n": 30, "p": 0.2, "d": 6, "beta": 2, "beta_minus": 1,
         "order": "queue", "start": "empty"},
        ("instance", "seed", "n", "m", "beta", "beta_minus", "order", "start", "steps",
         "step_bound", "edcs_edges", "phi_increasing", "violations")),
    "ddl-gap": Experiment(
        exp_ddl_gap, {"n": 200, "avg_degree": 20.0, "beta": 20, "lam": 0.1},
        ("instance", "seed", "m", "beta", "beta_minus", "gap", "bound", "within_bound",
         "violations")),
    "coreset-matching": Experiment(
        exp_coreset_matching, {**_BIP, "k": 4, "beta": 20, "beta_minus": 18, "eps": 0.1},
        ("instance", "seed", "m", "k", "union_edges", "max_coreset_edges", "matching",
         "oracle_mm", "ratio", "fitted_lambda", "violations")),
    "coreset-vc": Experiment(
        exp_coreset_vc, {**_BIP, "k": 4, "beta": 20, "beta_minus": 18, "eps": 0.1,
                         "cover": "matched"},
        ("instance", "seed", "m", "cover", "fixed", "maximal_matching", "ratio_to_bound",
         "feasible", "violations")),
    "maxmatching-coreset": Experiment(
        exp_maxmatching_coreset, {**_BIP, "k": 5},
        ("instance", "seed", "m", "k", "union_edges", "matching", "oracle_mm", "ratio",
         "violations")),
    "lowerbound-demo": Experiment(
        exp_lowerbound_demo, {"n": 400, "k": 10, "beta": 40, "beta_minus": 36},
        ("instance", "seed", "mm", "maxmatching_mm", "edcs_mm", "maxmatching_ratio",
         "edcs_ratio", "flagged_parts", "k_within_hypothesis", "violations")),
    "mpc-full": Experiment(
        exp_mpc_full, {"n": 1000, "d": 64},
        ("instance", "seed", "m", "matching", "cover", "cover_per_match", "depth",
         "depth_bound", "delta_decreasing", "leaks", "rounds", "peak_memory", "messages",
         "memory_violations", "feasible", "violations")),
    "mpc-iterate": Experiment(
        exp_mpc_iterate, {**_BIP, "p": 0.05, "eps": 0.2},
        ("instance", "seed", "m", "eps", "alpha", "iterations", "matching", "oracle_mm",
         "ratio", "rounds", "memory_violations", "violations")),
    "stream": Experiment(
        exp_stream, {**_BIP, "beta": 40, "beta_minus": 36, "s_target": 0, "variant": "edcs"},
        ("instance", "seed", "m", "variant", "k", "union_edges", "matching", "oracle_mm",
         "ratio", "peak_space", "space_bound", "within_space", "violations")),
    "concentration-demo": Experiment(
        exp_concentration_demo, {"n_left": 100, "n_right": 100, "p": 0.1, "sample_p": 0.5,
                                 "samples": 50},
        ("instance", "seed", "mm", "sample_p", "samples", "mean_sample_mm", "std_sample_mm",
         "scale", "violations")),
}


def _cell(x) -> str:
    if x is None:
        return UNAVAILABLE
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.6f}"
    return str(int(x)) if isinstance(x, np.integer) else str(x)


def format_rows(columns, rows) -> str:
    rows = sorted(rows, key=lambda r: (str(r["instance"]), int(r["seed"])))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_cell(r[c]) for c in columns])
    return buf.getvalue()


def run_experiment(name: str, config: dict[str, str], seeds: list[int],
                   ctx: Context | None = None) -> tuple[str, int]:
    """Return (CSV text, total violations)."""
    if name not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {name!r}; choose from {sorted(EXPERIMENTS)}")
    exp = EXPERIMENTS[name]
    cfg = resolve(exp.defaults, config)
    ctx = ctx or Context()
    rows = [row for seed in seeds for row in exp.run(cfg, seed, ctx)]
    return format_rows(exp.columns, rows), sum(int(r["violations"]) for r in rows)


# -- generators ----------------------------------------------------------------------

def generate(kind: str, args: list[str], seed: int) -> Graph:
    try:
        if kind == "lowerbound":
            n, k = (int(a) for a in args)
            return gen_lowerbound_graph(n, k)[0]
        if kind == "bipartite":
            nl, nr, p = int(args[0]), int(args[1]), float(args[2])
            return gen_random_bipartite(nl, nr, p, Rng(seed))
        if kind == "er":
            n, p = int(args[0]), float(args[1])
            return gen_random_graph(n, p, Rng(seed))
        if kind == "regular":
            n, d = (int(a) for a in args)
            return gen_regular_ish(n, d, Rng(seed))
    except (ValueError, IndexError) as exc:
        if isinstance(exc, GraphError):
            raise
        raise ConfigError(f"bad parameters for generator {kind!r}: {args}") from None
    raise ConfigError(f"unknown generator {kind!r}")


# -- entry point --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="edcsim", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an experiment over a seed range, emit CSV")
    run.add_argument("--experiment", required=True, choices=sorted(EXPERIMENTS))
    run.add_argument("--config", help="flat key=value file")
    run.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                     help="override one config key (repeatable)")
    run.add_argument("--seeds", help="inclusive seed range a..b")
    run.add_argument("--seed", type=int, default=0, help="single seed when --seeds is absent")
    run.add_argument("--out", help="CSV path (default: stdout)")
    run.add_argument("--mode", choices=("theory", "practice"), default="practice")
    run.add_argument("--s", type=int, help="per-machine memory parameter (default n)")
    run.add_argument("--base-threshold", type=float)
    run.add_argument("--alpha", type=float, default=8.0)
    run.add_argument("--trace-out", help="JSON path for MPC round traces")

    gen = sub.add_parser("gen", help="write a generated graph file")
    gen.add_argument("generator", choices=("lowerbound", "bipartite", "er", "regular"))
    gen.add_argument("params", nargs="*")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", help="graph path (default: stdout)")
    return parser


def _emit(text: str, path: str | None) -> None:
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "gen":
            _emit(format_graph(generate(args.generator, args.params, args.seed)), args.out)
            return 0
        config = parse_config(Path(args.config).read_text(), args.config) if args.config else {}
        config.update(parse_config("\n".join(args.set), "--set"))
        seeds = parse_seeds(args.seeds) if args.seeds else [args.seed]
        ctx = Context(args.mode, args.s, args.base_threshold, args.alpha,
                      {} if args.trace_out else None)
        text, violations = run_experiment(args.experiment, config, seeds, ctx)
    except (ConfigError, GraphError, OSError) as exc:
        parser.exit(2, f"edcsim: error: {exc}\n")
    _emit(text, args.out)
    if args.trace_out:
        Path(args.trace_out).write_text(json.dumps(ctx.traces, sort_keys=True) + "\n")
    return 0 if violations == 0 else 1


if __name__ == "__main__":
    sys.exit(main())
