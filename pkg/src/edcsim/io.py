"""Plain-text graph files: ``n m`` then one ``u v`` line per edge."""

from __future__ import annotations

import os
from pathlib import Path

import numpy as np

from .graph import Graph, GraphError


def format_graph(g: Graph, header: str | None = None) -> str:
    lines = []
    if header:
        lines.append(header)
    lines.append(f"{g.n} {g.m}")
    lines.extend(f"{u} {v}" for u, v in g.edges.tolist())
    return "\n".join(lines) + "\n"


def write_graph(g: Graph, path: str | os.PathLike, header: str | None = None) -> None:
    """Write ``g`` with edges sorted, so equal graphs give identical bytes."""
    Path(path).write_text(format_graph(g, header))


def parse_graph(text: str, source: str = "<string>") -> tuple[Graph, list[str]]:
    """Parse graph text; returns the graph and any leading ``#`` header lines."""
    headers: list[str] = []
    body: list[tuple[int, str]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            if body:
                raise GraphError(f"{source}:{lineno}: comment after the size line")
            headers.append(line)
            continue
        body.append((lineno, line))
    if not body:
        raise GraphError(f"{source}: missing 'n m' size line")
    lineno, first = body[0]
    try:
        n, m = (int(t) for t in first.split())
    except ValueError:
        raise GraphError(f"{source}:{lineno}: expected 'n m', got {first!r}") from None
    if len(body) - 1 != m:
        raise GraphError(f"{source}: header declares {m} edges, found {len(body) - 1}")
    edges = np.empty((m, 2), dtype=np.int64)
    seen: dict[tuple[int, int], int] = {}
    for i, (lineno, line) in enumerate(body[1:]):
        parts = line.split()
        if len(parts) != 2:
            raise GraphError(f"{source}:{lineno}: expected 'u v', got {line!r}")
        u, v = int(parts[0]), int(parts[1])
        if u == v:
            raise GraphError(f"{source}:{lineno}: self-loop on vertex {u}")
        if not (0 <= u < n and 0 <= v < n):
            raise GraphError(f"{source}:{lineno}: vertex id outside [0, {n})")
        key = (min(u, v), max(u, v))
        if key in seen:
            raise GraphError(f"{source}:{lineno}: parallel edge {key} (first on line {seen[key]})")
        seen[key] = lineno
        edges[i] = key
    return Graph(n, edges), headers


def read_graph(path: str | os.PathLike) -> Graph:
    return parse_graph(Path(path).read_text(), str(path))[0]
