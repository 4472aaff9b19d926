"""Bipartite extensions of arbitrary graphs via K-coloring.

A proper coloring splits the nodes into color classes; choosing a split
index ``l`` yields a foundation bipartite graph that keeps only edges
crossing the split. Every node touched by a dropped (intra-set) edge is
duplicated into the opposite side, each dropped edge (u, v, w) is rerouted
symmetrically as (u, v', w) and (v, u', w), and each duplicate is tied to
its original by a unit-weight vertical edge. The result is bipartite,
contains every original edge (directly or rerouted), and has redundancy

    rho = N1 / N0 = 2 - (I(low) + I(high)) / N0,

where I counts nodes with no incident dropped edge.

Duplicate nodes are appended after the originals in ascending order of
the node they copy; ``duplicate_of`` maps each added index back to it.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    BadSplitIndexError,
    InconsistentExtensionError,
    TooSmallError,
)
from .graphs import Bipartition, Edge, Graph, bfs_two_coloring, build_graph, ring_graph

REDUNDANCY_TOL = 1e-12


@dataclass(frozen=True)
class Coloring:
    """Proper node coloring with colors ``0..k-1``."""

    colors: tuple[int, ...]
    k: int

    def classes(self) -> list[list[int]]:
        """Node lists per color, ascending within each class."""
        out: list[list[int]] = [[] for _ in range(self.k)]
        for node, c in enumerate(self.colors):
            out[c].append(node)
        return out


@dataclass(frozen=True, eq=False)
class OversampledExtension:
    """A bipartite extension together with its bookkeeping.

    Attributes:
        original: The graph being extended (size N0).
        extended: The bipartite extension (size N1 >= N0); node indices
            below N0 are the originals.
        bipartition: Bipartition of the extended graph.
        duplicate_of: Maps each added node index (>= N0) to its original.
        original_bipartition: The foundation split of the original nodes.
        dropped_edges: Intra-set edges removed from the foundation graph
            and rerouted through duplicates.
        redundancy: N1 / N0.
    """

    original: Graph
    extended: Graph
    bipartition: Bipartition
    duplicate_of: dict[int, int]
    original_bipartition: Bipartition
    dropped_edges: tuple[Edge, ...]
    redundancy: float

    @property
    def n0(self) -> int:
        return self.original.n

    @property
    def n1(self) -> int:
        return self.extended.n

    def row_map(self) -> np.ndarray:
        """Length-N1 vector sending every extended node to its original."""
        m = np.arange(self.n1)
        for dup, orig in self.duplicate_of.items():
            m[dup] = orig
        return m


def greedy_coloring(g: Graph) -> Coloring:
    """Welsh-Powell greedy coloring.

    Nodes are processed in descending-degree order (ties broken by node
    index) and each receives the smallest color absent among its
    already-colored neighbors.
    """
    unweighted_deg = (g.adjacency > 0.0).sum(axis=1)
    order = sorted(range(g.n), key=lambda u: (-int(unweighted_deg[u]), u))
    colors = np.full(g.n, -1, dtype=int)
    for u in order:
        used = {int(colors[v]) for v in g.neighbors(u) if colors[v] >= 0}
        c = 0
        while c in used:
            c += 1
        colors[u] = c
    k = int(colors.max()) + 1 if g.n else 0
    return Coloring(colors=tuple(int(c) for c in colors), k=k)


def foundation_bipartite(
    g: Graph, coloring: Coloring, split: int
) -> tuple[Graph, Bipartition, list[Edge]]:
    """Keep only edges crossing the color-class split.

    Colors ``0..split-1`` form the low set, ``split..k-1`` the high set.
    Returns the bipartite foundation graph, its bipartition, and the
    dropped intra-set edges.
    """
    if not (1 <= split < coloring.k):
        raise BadSplitIndexError(
            f"split must lie in [1, {coloring.k}), got {split}"
        )
    in_low = [c < split for c in coloring.colors]
    kept, dropped = [], []
    for u, v, w in g.edges:
        (kept if in_low[u] != in_low[v] else dropped).append((u, v, w))
    bip = Bipartition(
        low=frozenset(u for u in range(g.n) if in_low[u]),
        high=frozenset(u for u in range(g.n) if not in_low[u]),
    )
    return build_graph(g.n, kept), bip, dropped


def identity_extension(g: Graph, bipartition: Bipartition) -> OversampledExtension:
    """Trivial extension of an already-bipartite graph (rho = 1)."""
    return OversampledExtension(
        original=g,
        extended=g,
        bipartition=bipartition,
        duplicate_of={},
        original_bipartition=bipartition,
        dropped_edges=(),
        redundancy=1.0,
    )


def extend_graph(
    g: Graph, coloring: Coloring, split: int, vertical_weight: float = 1.0
) -> OversampledExtension:
    """Oversampled bipartite extension from a coloring and split index.

    Nodes with no incident dropped edge are left alone; every other node
    u gains a duplicate u' in the opposite bipartite set, linked by a
    vertical edge of weight ``vertical_weight``. Each dropped edge
    (u, v, w) is rerouted as (u, v', w) and (v, u', w).
    """
    foundation, bip, dropped = foundation_bipartite(g, coloring, split)
    touched = sorted({u for u, v, _ in dropped} | {v for u, v, _ in dropped})
    n0 = g.n
    dup_index = {u: n0 + i for i, u in enumerate(touched)}
    duplicate_of = {n0 + i: u for i, u in enumerate(touched)}

    edges: list[Edge] = list(foundation.edges)
    for u, v, w in dropped:
        edges.append((u, dup_index[v], w))
        edges.append((v, dup_index[u], w))
    for u in touched:
        edges.append((u, dup_index[u], vertical_weight))

    low = set(bip.low)
    high = set(bip.high)
    for u in touched:
        (high if u in bip.low else low).add(dup_index[u])
    n1 = n0 + len(touched)
    return OversampledExtension(
        original=g,
        extended=build_graph(n1, edges),
        bipartition=Bipartition(low=frozenset(low), high=frozenset(high)),
        duplicate_of=duplicate_of,
        original_bipartition=bip,
        dropped_edges=tuple(dropped),
        redundancy=n1 / n0,
    )


def ring_extend(t: int, vertical_weight: float = 1.0) -> OversampledExtension:
    """Bipartite extension of the length-``t`` time ring.

    Even rings are already bipartite and pass through unchanged with the
    natural alternating bipartition. An odd ring t = 2m+1 uses the three
    color classes {evens below t-1} (m nodes), {t-1} (1 node), {odds}
    (m nodes), with the first two as the low side; exactly one edge is
    dropped and the extension ends up with m+1 low and m+2 high nodes,
    so rho = (2m+3)/(2m+1).
    """
    g = ring_graph(t)
    if t % 2 == 0:
        bip = Bipartition(
            low=frozenset(range(0, t, 2)), high=frozenset(range(1, t, 2))
        )
        return identity_extension(g, bip)
    # color 0 = evens, 1 = the singleton {t-1}, 2 = odds; split after color 1
    colors = tuple(2 if i % 2 else 0 for i in range(t - 1)) + (1,)
    return extend_graph(
        g, Coloring(colors=colors, k=3), split=2, vertical_weight=vertical_weight
    )


def bipartite_double_cover(g: Graph) -> OversampledExtension:
    """Tensor product with K2: 2*N0 nodes, no vertical edges, rho = 2."""
    n0 = g.n
    edges: list[Edge] = []
    for u, v, w in g.edges:
        edges.append((u, v + n0, w))
        edges.append((v, u + n0, w))
    return OversampledExtension(
        original=g,
        extended=build_graph(2 * n0, edges),
        bipartition=Bipartition(
            low=frozenset(range(n0)), high=frozenset(range(n0, 2 * n0))
        ),
        duplicate_of={n0 + u: u for u in range(n0)},
        original_bipartition=Bipartition(low=frozenset(range(n0)), high=frozenset()),
        dropped_edges=tuple(g.edges),
        redundancy=2.0,
    )


def harary_bipartition(
    g: Graph, seed: int, restarts: int = 8
) -> tuple[Graph, Bipartition, list[Edge]]:
    """Greedy max-cut bipartite subgraph (critically sampled baseline).

    Runs ``restarts`` seeded random assignments, each improved by
    single-node flips until no flip increases the cut weight; if the
    graph is bipartite one restart starts from the exact BFS 2-coloring
    so all edges end up in the cut. Returns the subgraph keeping only
    cut edges, the best assignment, and the dropped intra-set edges.
    """
    rng = np.random.default_rng(seed)
    starts = [rng.integers(0, 2, size=g.n).astype(bool) for _ in range(restarts)]
    exact = bfs_two_coloring(g)
    if exact is not None:
        side = np.zeros(g.n, dtype=bool)
        side[sorted(exact.high)] = True
        starts.insert(0, side)

    adjacency = g.adjacency
    best_cut = -1.0
    best_side = None
    for side in starts:
        improved = True
        while improved:
            improved = False
            for u in range(g.n):
                same = adjacency[u, side == side[u]].sum()
                cross = adjacency[u, side != side[u]].sum()
                if same > cross:
                    side[u] = not side[u]
                    improved = True
        cut = sum(w for u, v, w in g.edges if side[u] != side[v])
        if cut > best_cut:
            best_cut = cut
            best_side = side.copy()

    # node 0 always lands in the low set
    if best_side[0]:
        best_side = ~best_side
    kept = [(u, v, w) for u, v, w in g.edges if best_side[u] != best_side[v]]
    dropped = [(u, v, w) for u, v, w in g.edges if best_side[u] == best_side[v]]
    bip = Bipartition(
        low=frozenset(np.flatnonzero(~best_side).tolist()),
        high=frozenset(np.flatnonzero(best_side).tolist()),
    )
    return build_graph(g.n, kept), bip, dropped


def redundancy(e: OversampledExtension) -> float:
    """N1/N0, asserting agreement with the isolated-node-count formula."""
    by_count = e.n1 / e.n0
    touched = {u for u, v, _ in e.dropped_edges} | {v for u, v, _ in e.dropped_edges}
    iso_low = sum(1 for u in e.original_bipartition.low if u not in touched)
    iso_high = sum(1 for u in e.original_bipartition.high if u not in touched)
    by_isolation = 2.0 - (iso_low + iso_high) / e.n0
    if abs(by_count - by_isolation) > REDUNDANCY_TOL:
        raise InconsistentExtensionError(
            f"redundancy formulas disagree: {by_count} vs {by_isolation}"
        )
    return by_count
