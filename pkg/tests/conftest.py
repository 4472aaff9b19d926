"""Shared graph generators and numeric helpers for the test suite."""
from __future__ import annotations

import numpy as np
import pytest

from jtvfb.graphs import Graph, build_graph


def erdos_renyi(n: int, p: float, seed: int) -> Graph:
    rng = np.random.default_rng(seed)
    edges = [
        (u, v, 1.0)
        for u in range(n)
        for v in range(u + 1, n)
        if rng.random() < p
    ]
    return build_graph(n, edges)


def random_connected_graph(n: int, seed: int, extra_p: float = 0.15) -> Graph:
    """Random spanning tree plus extra edges; always connected."""
    rng = np.random.default_rng(seed)
    edges = set()
    for v in range(1, n):
        u = int(rng.integers(0, v))
        edges.add((u, v))
    for u in range(n):
        for v in range(u + 1, n):
            if (u, v) not in edges and rng.random() < extra_p:
                edges.add((u, v))
    return build_graph(n, [(u, v, 1.0) for u, v in sorted(edges)])


def geometric_graph(n: int, radius: float, seed: int) -> Graph:
    """Random geometric graph on the unit square."""
    rng = np.random.default_rng(seed)
    pts = rng.random((n, 2))
    edges = [
        (u, v, 1.0)
        for u in range(n)
        for v in range(u + 1, n)
        if float(np.hypot(*(pts[u] - pts[v]))) <= radius
    ]
    return build_graph(n, edges)


def is_connected(g: Graph) -> bool:
    seen = {0}
    stack = [0]
    while stack:
        u = stack.pop()
        for v in g.neighbors(u):
            v = int(v)
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return len(seen) == g.n


def rel_error(actual: np.ndarray, expected: np.ndarray) -> float:
    denom = float(np.linalg.norm(expected))
    if denom == 0.0:
        return float(np.linalg.norm(actual))
    return float(np.linalg.norm(actual - expected)) / denom


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
