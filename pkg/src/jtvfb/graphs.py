"""Weighted undirected graphs, normalized Laplacians, and eigendecomposition.

Graphs are simple (no self-loops, no multi-edges) with strictly positive
edge weights, stored densely. The symmetric normalized Laplacian
D^{-1/2} (D - A) D^{-1/2} has its spectrum in [0, 2]; for bipartite graphs
it is symmetric about 1, which is the property the filter banks rely on.

Eigendecomposition is deterministic for identical input bits: eigenvalues
ascend, and each eigenvector column is flipped so its first entry of
magnitude > 1e-8 is positive.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatchError,
    DuplicateEdgeError,
    IndexOutOfRangeError,
    IsolatedNodeError,
    NoConvergenceError,
    NonPositiveWeightError,
    NotSymmetricError,
    SelfLoopError,
    TooSmallError,
)

SIGN_TOL = 1e-8
SYMMETRY_TOL = 1e-12

Edge = tuple[int, int, float]


def _frozen_array(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.float64)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Graph:
    """Weighted undirected simple graph with a dense adjacency matrix."""

    n: int
    edges: tuple[Edge, ...]
    adjacency: np.ndarray

    @property
    def degrees(self) -> np.ndarray:
        """Weighted degree vector (row sums of the adjacency matrix)."""
        return self.adjacency.sum(axis=1)

    def neighbors(self, u: int) -> np.ndarray:
        """Indices adjacent to ``u``."""
        return np.flatnonzero(self.adjacency[u] > 0.0)


@dataclass(frozen=True)
class Bipartition:
    """Two disjoint node sets covering ``{0, ..., n-1}``."""

    low: frozenset[int]
    high: frozenset[int]

    def __post_init__(self):
        object.__setattr__(self, "low", frozenset(self.low))
        object.__setattr__(self, "high", frozenset(self.high))
        if self.low & self.high:
            raise DimensionMismatchError("bipartition sets overlap")
        n = len(self.low) + len(self.high)
        if (self.low | self.high) != set(range(n)):
            raise DimensionMismatchError(
                "bipartition does not cover a contiguous index range"
            )

    @property
    def n(self) -> int:
        return len(self.low) + len(self.high)

    def signs(self) -> np.ndarray:
        """+1 on the low set, -1 on the high set."""
        c = np.full(self.n, -1.0)
        c[sorted(self.low)] = 1.0
        return c


@dataclass(frozen=True, eq=False)
class SpectralBasis:
    """Ascending eigenvalues with orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "eigenvalues", _frozen_array(self.eigenvalues))
        object.__setattr__(self, "eigenvectors", _frozen_array(self.eigenvectors))

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]


def build_graph(n: int, edges) -> Graph:
    """Assemble a Graph from an edge list.

    Args:
        n: Node count.
        edges: Iterable of ``(u, v)`` or ``(u, v, w)`` tuples; ``w``
            defaults to 1.0.

    Raises:
        IndexOutOfRangeError, SelfLoopError, DuplicateEdgeError,
        NonPositiveWeightError: On invalid edges.
    """
    if n <= 0:
        raise TooSmallError(f"node count must be positive, got {n}")
    adjacency = np.zeros((n, n))
    canonical: list[Edge] = []
    seen: set[tuple[int, int]] = set()
    for e in edges:
        if len(e) == 2:
            u, v = e
            w = 1.0
        else:
            u, v, w = e
        u, v, w = int(u), int(v), float(w)
        if not (0 <= u < n and 0 <= v < n):
            raise IndexOutOfRangeError(f"edge ({u},{v}) outside [0,{n})")
        if u == v:
            raise SelfLoopError(f"self-loop at node {u}")
        if w <= 0.0:
            raise NonPositiveWeightError(f"edge ({u},{v}) has weight {w}")
        key = (min(u, v), max(u, v))
        if key in seen:
            raise DuplicateEdgeError(f"duplicate edge {key}")
        seen.add(key)
        canonical.append((key[0], key[1], w))
        adjacency[u, v] = w
        adjacency[v, u] = w
    return Graph(n=n, edges=tuple(canonical), adjacency=_frozen_array(adjacency))


def ring_graph(t: int) -> Graph:
    """Cycle graph on ``t`` nodes with unit weights."""
    if t < 3:
        raise TooSmallError(f"ring needs at least 3 nodes, got {t}")
    return build_graph(t, [(i, (i + 1) % t, 1.0) for i in range(t)])


def grid_graph(rows: int, cols: int, connectivity: int = 4) -> Graph:
    """Lattice graph over row-major pixel indices.

    ``connectivity=4`` links horizontal/vertical neighbors; 8 adds
    diagonals. Unit weights.
    """
    if rows < 1 or cols < 1:
        raise TooSmallError("grid needs at least one row and column")
    if connectivity not in (4, 8):
        raise DimensionMismatchError(f"connectivity must be 4 or 8, got {connectivity}")
    edges = []
    for r in range(rows):
        for c in range(cols):
            i = r * cols + c
            if c + 1 < cols:
                edges.append((i, i + 1, 1.0))
            if r + 1 < rows:
                edges.append((i, i + cols, 1.0))
            if connectivity == 8 and r + 1 < rows:
                if c + 1 < cols:
                    edges.append((i, i + cols + 1, 1.0))
                if c - 1 >= 0:
                    edges.append((i, i + cols - 1, 1.0))
    return build_graph(rows * cols, edges)


def normalized_laplacian(g: Graph, strict: bool = False) -> np.ndarray:
    """Symmetric normalized Laplacian D^{-1/2} (D - A) D^{-1/2}.

    Zero-degree nodes get a zero row/column (a lone 0 eigenvalue) unless
    ``strict`` is set, in which case they raise IsolatedNodeError.
    """
    deg = g.degrees
    isolated = deg <= 0.0
    if strict and isolated.any():
        raise IsolatedNodeError(
            f"isolated nodes {np.flatnonzero(isolated).tolist()} in strict mode"
        )
    inv_sqrt = np.zeros_like(deg)
    np.sqrt(deg, out=inv_sqrt, where=~isolated)
    inv_sqrt[~isolated] = 1.0 / inv_sqrt[~isolated]
    lap = np.diag(deg) - g.adjacency
    return inv_sqrt[:, None] * lap * inv_sqrt[None, :]


def require_symmetric(m: np.ndarray, tol: float = SYMMETRY_TOL) -> np.ndarray:
    """Validate that ``m`` is square and symmetric within ``tol``."""
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise NotSymmetricError(f"expected a square matrix, got shape {m.shape}")
    if m.size and np.max(np.abs(m - m.T)) > tol:
        raise NotSymmetricError("matrix is not symmetric within tolerance")
    return m


def eigendecompose(m: np.ndarray) -> SpectralBasis:
    """Eigendecompose a symmetric matrix with a fixed sign convention.

    Eigenvalues come back ascending; each eigenvector column is oriented
    so its first entry with magnitude > 1e-8 is positive, making the
    result deterministic for identical input bits.
    """
    m = require_symmetric(m)
    try:
        eigenvalues, eigenvectors = np.linalg.eigh(m)
    except np.linalg.LinAlgError as exc:
        raise NoConvergenceError(str(exc)) from exc
    for k in range(eigenvectors.shape[1]):
        col = eigenvectors[:, k]
        lead = np.flatnonzero(np.abs(col) > SIGN_TOL)
        if lead.size and col[lead[0]] < 0.0:
            eigenvectors[:, k] = -col
    return SpectralBasis(eigenvalues=eigenvalues, eigenvectors=eigenvectors)


def check_bipartite(g: Graph, b: Bipartition) -> bool:
    """True iff every edge of ``g`` crosses between ``b.low`` and ``b.high``."""
    if b.n != g.n:
        raise DimensionMismatchError(
            f"bipartition covers {b.n} nodes, graph has {g.n}"
        )
    low = b.low
    for u, v, _ in g.edges:
        if (u in low) == (v in low):
            return False
    return True


def bfs_two_coloring(g: Graph) -> Bipartition | None:
    """BFS 2-coloring; returns a Bipartition or None if not bipartite.

    Components are seeded in ascending node order with color 0, so the
    result is deterministic.
    """
    color = np.full(g.n, -1, dtype=int)
    for start in range(g.n):
        if color[start] >= 0:
            continue
        color[start] = 0
        queue = [start]
        while queue:
            u = queue.pop(0)
            for v in g.neighbors(u):
                v = int(v)
                if color[v] < 0:
                    color[v] = 1 - color[u]
                    queue.append(v)
                elif color[v] == color[u]:
                    return None
    return Bipartition(
        low=frozenset(np.flatnonzero(color == 0).tolist()),
        high=frozenset(np.flatnonzero(color == 1).tolist()),
    )


def read_edgelist(path) -> Graph:
    """Read a graph from the edge-list text format.

    First line ``# nodes N``; each following non-empty, non-comment line
    is ``u v [w]`` with 0-based indices and ``w`` defaulting to 1.0.
    """
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    header = None
    edges = []
    for raw in lines:
        line = raw.strip()
        if not line:
            continue
        if header is None:
            parts = line.split()
            if len(parts) != 3 or parts[0] != "#" or parts[1] != "nodes":
                raise DimensionMismatchError(
                    f"{path}: first line must be '# nodes N', got {line!r}"
                )
            header = int(parts[2])
            continue
        if line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) not in (2, 3):
            raise DimensionMismatchError(f"{path}: malformed edge line {line!r}")
        u, v = int(parts[0]), int(parts[1])
        w = float(parts[2]) if len(parts) == 3 else 1.0
        edges.append((u, v, w))
    if header is None:
        raise DimensionMismatchError(f"{path}: missing '# nodes N' header")
    return build_graph(header, edges)


def write_edgelist(path, g: Graph) -> None:
    """Write a graph in the edge-list text format."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# nodes {g.n}\n")
        for u, v, w in g.edges:
            fh.write(f"{u} {v} {w!r}\n")
