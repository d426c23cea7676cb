"""Vertex-weighted undirected graphs, random MWIS instances and the text format.

File format (one record per line, ids 1-based)::

    c optional comment
    p mwis <n> <m>
    v <id> <weight>      (n lines)
    e <u> <v>            (m lines)
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np


class GraphError(ValueError):
    """Invalid graph parameters or malformed graph file."""


@dataclass(frozen=True)
class WeightedGraph:
    """Simple undirected graph with positive integer vertex weights.

    Edges are stored canonically as sorted ``(u, v)`` pairs with ``u < v``.
    """

    weights: tuple[int, ...]
    edges: tuple[tuple[int, int], ...]

    def __init__(self, weights: Iterable[int], edges: Iterable[tuple[int, int]] = ()):
        weights = tuple(int(w) for w in weights)
        n = len(weights)
        if n == 0:
            raise GraphError("graph needs at least one vertex")
        for i, w in enumerate(weights):
            if w < 1:
                raise GraphError(f"vertex {i} has weight {w} < 1")
        canon = set()
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise GraphError(f"self-loop on vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u}, {v}) references a missing vertex")
            e = (u, v) if u < v else (v, u)
            if e in canon:
                raise GraphError(f"duplicate edge {e}")
            canon.add(e)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "edges", tuple(sorted(canon)))

    @property
    def n(self) -> int:
        return len(self.weights)

    def degree(self, i: int) -> int:
        return sum(1 for e in self.edges if i in e)

    def degrees(self) -> list[int]:
        deg = [0] * self.n
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    def neighbors(self) -> list[set[int]]:
        adj: list[set[int]] = [set() for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return adj


def max_degree(g: WeightedGraph) -> int:
    return max(g.degrees())


def generate_random_graph(k: int, edge_probability: float = 0.5, seed: int = 0) -> WeightedGraph:
    """Random instance: weights uniform on ``{1, ..., 2k+1}``, G(k, p) edges.

    Deterministic in ``(k, edge_probability, seed)``.
    """
    if k < 1:
        raise GraphError(f"k must be >= 1, got {k}")
    if not 0.0 <= edge_probability <= 1.0:
        raise GraphError(f"edge_probability must lie in [0, 1], got {edge_probability}")
    rng = np.random.default_rng(seed)
    weights = rng.integers(1, 2 * k + 2, size=k)
    iu, ju = np.triu_indices(k, 1)
    keep = rng.random(iu.size) < edge_probability
    edges = zip(iu[keep].tolist(), ju[keep].tolist())
    return WeightedGraph(weights.tolist(), edges)


def write_graph(g: WeightedGraph) -> bytes:
    lines = [f"p mwis {g.n} {len(g.edges)}"]
    lines += [f"v {i + 1} {w}" for i, w in enumerate(g.weights)]
    lines += [f"e {u + 1} {v + 1}" for u, v in g.edges]
    return ("\n".join(lines) + "\n").encode("utf-8")


def parse_graph(text: bytes | str) -> WeightedGraph:
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    header = None
    weights: dict[int, int] = {}
    edges: list[tuple[int, int]] = []
    seen_edges: set[tuple[int, int]] = set()

    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.strip()
        if not line or line == "c" or line.startswith("c "):
            continue
        parts = line.split()
        tag = parts[0]
        try:
            nums = [int(p) for p in parts[1:]] if tag != "p" else None
        except ValueError:
            raise GraphError(f"line {lineno}: non-integer field in {line!r}") from None
        if tag == "p":
            if header is not None:
                raise GraphError(f"line {lineno}: repeated header")
            if len(parts) != 4 or parts[1] != "mwis":
                raise GraphError(f"line {lineno}: expected 'p mwis <n> <m>', got {line!r}")
            try:
                header = (int(parts[2]), int(parts[3]))
            except ValueError:
                raise GraphError(f"line {lineno}: non-integer header field") from None
            if header[0] < 1 or header[1] < 0:
                raise GraphError(f"line {lineno}: invalid header counts")
            continue
        if header is None:
            raise GraphError(f"line {lineno}: record before 'p mwis' header")
        n = header[0]
        if tag == "v":
            if len(nums) != 2:
                raise GraphError(f"line {lineno}: expected 'v <id> <weight>'")
            vid, w = nums
            if not 1 <= vid <= n:
                raise GraphError(f"line {lineno}: vertex id {vid} out of range 1..{n}")
            if vid in weights:
                raise GraphError(f"line {lineno}: duplicate vertex {vid}")
            if w < 1:
                raise GraphError(f"line {lineno}: weight {w} < 1")
            weights[vid] = w
        elif tag == "e":
            if len(nums) != 2:
                raise GraphError(f"line {lineno}: expected 'e <u> <v>'")
            u, v = nums
            for x in (u, v):
                if x not in weights:
                    raise GraphError(f"line {lineno}: undeclared vertex {x}")
            if u == v:
                raise GraphError(f"line {lineno}: self-loop on vertex {u}")
            key = (min(u, v), max(u, v))
            if key in seen_edges:
                raise GraphError(f"line {lineno}: duplicate edge {u} {v}")
            seen_edges.add(key)
            edges.append((u - 1, v - 1))
        else:
            raise GraphError(f"line {lineno}: unknown record type {tag!r}")

    if header is None:
        raise GraphError("missing 'p mwis' header")
    n, m = header
    if len(weights) != n:
        raise GraphError(f"header declares {n} vertices, found {len(weights)}")
    if len(edges) != m:
        raise GraphError(f"header declares {m} edges, found {len(edges)}")
    return WeightedGraph([weights[i] for i in range(1, n + 1)], edges)
