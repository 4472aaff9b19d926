"""Kronecker-sum joint Laplacian, joint Fourier transform, and signal blocks.

A joint signal is a plain N x T float array: rows are graph vertices,
columns are time steps. Vectorization is column-major (stack columns), so
the joint node (v, t) has flat index t*N + v and vec(A X B^T) =
(B kron A) vec(X) holds with numpy's ``order="F"``.

All transforms use real orthonormal eigenbases of the symmetric
normalized Laplacians of the two factor graphs; the joint Laplacian is
the Kronecker sum L_T kron I + I kron L_G, whose eigenvalues are all
pairwise sums of factor eigenvalues.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, JTVError, TooLargeToMaterializeError
from .extension import OversampledExtension
from .graphs import (
    Bipartition,
    Graph,
    SpectralBasis,
    eigendecompose,
    normalized_laplacian,
)

MATERIALIZE_LIMIT = 10_000
EIGENVALUE_CLAMP_TOL = 1e-9


def _as_graph(factor) -> Graph:
    return factor.extended if isinstance(factor, OversampledExtension) else factor


@dataclass(frozen=True, eq=False)
class JointGraph:
    """Factor graphs with their normalized Laplacians and eigenbases."""

    vertex_graph: Graph
    time_graph: Graph
    vertex_laplacian: np.ndarray
    time_laplacian: np.ndarray
    vertex_basis: SpectralBasis
    time_basis: SpectralBasis

    @property
    def n(self) -> int:
        return self.vertex_graph.n

    @property
    def t(self) -> int:
        return self.time_graph.n


def build_joint(vertex, time) -> JointGraph:
    """Assemble a JointGraph from Graphs or OversampledExtensions."""
    vg, tg = _as_graph(vertex), _as_graph(time)
    lv = normalized_laplacian(vg)
    lt = normalized_laplacian(tg)
    return JointGraph(
        vertex_graph=vg,
        time_graph=tg,
        vertex_laplacian=lv,
        time_laplacian=lt,
        vertex_basis=eigendecompose(lv),
        time_basis=eigendecompose(lt),
    )


@dataclass(frozen=True, eq=False)
class KroneckerSumOperator:
    """Matrix-free joint Laplacian ``x -> vec(L_G X + X L_T)``."""

    vertex_laplacian: np.ndarray
    time_laplacian: np.ndarray

    @property
    def shape(self) -> tuple[int, int]:
        nt = self.vertex_laplacian.shape[0] * self.time_laplacian.shape[0]
        return (nt, nt)

    def matvec(self, x: np.ndarray) -> np.ndarray:
        n = self.vertex_laplacian.shape[0]
        t = self.time_laplacian.shape[0]
        if x.shape != (n * t,):
            raise DimensionMismatchError(
                f"operand has shape {x.shape}, expected ({n * t},)"
            )
        X = x.reshape((n, t), order="F")
        return (self.vertex_laplacian @ X + X @ self.time_laplacian).ravel(order="F")


def joint_laplacian(j: JointGraph, materialize: bool = True):
    """Kronecker-sum joint Laplacian, dense or matrix-free.

    Dense form is L_T kron I_N + I_T kron L_G and is refused above
    N*T = 10,000 entries per side.
    """
    if not materialize:
        return KroneckerSumOperator(j.vertex_laplacian, j.time_laplacian)
    nt = j.n * j.t
    if nt > MATERIALIZE_LIMIT:
        raise TooLargeToMaterializeError(
            f"joint size {nt} exceeds materialization limit {MATERIALIZE_LIMIT}"
        )
    return np.kron(j.time_laplacian, np.eye(j.n)) + np.kron(
        np.eye(j.t), j.vertex_laplacian
    )


def _signal_data(x) -> np.ndarray:
    return x.data if isinstance(x, ExtendedJointSignal) else np.asarray(x, dtype=float)


def jft(x, j: JointGraph) -> np.ndarray:
    """Joint Fourier transform U_G^T X U_T (vertex GFT + time transform)."""
    data = _signal_data(x)
    if data.shape != (j.n, j.t):
        raise DimensionMismatchError(
            f"signal {data.shape} does not match joint graph ({j.n}, {j.t})"
        )
    return j.vertex_basis.eigenvectors.T @ data @ j.time_basis.eigenvectors


def ijft(s: np.ndarray, j: JointGraph) -> np.ndarray:
    """Inverse joint Fourier transform U_G S U_T^T."""
    s = np.asarray(s, dtype=float)
    if s.shape != (j.n, j.t):
        raise DimensionMismatchError(
            f"spectrum {s.shape} does not match joint graph ({j.n}, {j.t})"
        )
    return j.vertex_basis.eigenvectors @ s @ j.time_basis.eigenvectors.T


def joint_bipartition(bt: Bipartition, bg: Bipartition) -> Bipartition:
    """Bipartition of the joint graph from factor bipartitions.

    Joint node (v, t) lands in the low set iff t and v come from the
    same side of their factor bipartitions (low x low or high x high);
    flat index is t*N + v. Valid for both the Cartesian and the tensor
    product of two bipartite factors.
    """
    n = bg.n
    low = set()
    for t in bt.low:
        for v in bg.low:
            low.add(t * n + v)
    for t in bt.high:
        for v in bg.high:
            low.add(t * n + v)
    total = n * bt.n
    high = frozenset(range(total)) - low
    return Bipartition(low=frozenset(low), high=high)


@dataclass(frozen=True, eq=False)
class ExtendedJointSignal:
    """N1 x T1 signal in the block layout [[X00, X10], [X01, X11]].

    The leading n0 x t0 block holds the original signal; ``row_map`` and
    ``col_map`` send every extended row/column to the original one it
    duplicates (identity on the originals themselves).
    """

    data: np.ndarray
    n0: int
    t0: int
    row_map: np.ndarray
    col_map: np.ndarray
    fill_mode: str

    @property
    def n1(self) -> int:
        return self.data.shape[0]

    @property
    def t1(self) -> int:
        return self.data.shape[1]

    def with_data(self, data: np.ndarray) -> "ExtendedJointSignal":
        """Same block layout, new values (e.g. after filtering)."""
        if data.shape != self.data.shape:
            raise DimensionMismatchError(
                f"replacement shape {data.shape} != {self.data.shape}"
            )
        return ExtendedJointSignal(
            data=np.asarray(data, dtype=float),
            n0=self.n0,
            t0=self.t0,
            row_map=self.row_map,
            col_map=self.col_map,
            fill_mode=self.fill_mode,
        )


def extend_signal(
    x: np.ndarray,
    eg: OversampledExtension,
    et: OversampledExtension,
    fill: str = "zero",
) -> ExtendedJointSignal:
    """Lift an N0 x T0 signal onto the extended joint graph.

    ``fill="zero"`` leaves the new blocks at zero; ``fill="copy"`` gives
    every duplicated row/column (and row-column corner) the value of its
    original.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (eg.n0, et.n0):
        raise DimensionMismatchError(
            f"signal {x.shape} does not match extension originals "
            f"({eg.n0}, {et.n0})"
        )
    if fill not in ("zero", "copy"):
        raise DimensionMismatchError(f"unknown fill mode {fill!r}")
    row_map = eg.row_map()
    col_map = et.row_map()
    if fill == "copy":
        data = x[np.ix_(row_map, col_map)]
    else:
        data = np.zeros((eg.n1, et.n1))
        data[: eg.n0, : et.n0] = x
    return ExtendedJointSignal(
        data=data,
        n0=eg.n0,
        t0=et.n0,
        row_map=row_map,
        col_map=col_map,
        fill_mode=fill,
    )


def restrict_signal(xt: ExtendedJointSignal, mode: str = "take") -> np.ndarray:
    """Project an extended signal back to the original N0 x T0 shape.

    ``mode="take"`` returns the leading block; ``mode="average"``
    averages each original entry with all of its duplicate images.
    """
    if mode == "take":
        return xt.data[: xt.n0, : xt.t0].copy()
    if mode != "average":
        raise DimensionMismatchError(f"unknown restrict mode {mode!r}")
    acc = np.zeros((xt.n0, xt.t0))
    count = np.zeros((xt.n0, xt.t0))
    rows = xt.row_map[:, None]
    cols = xt.col_map[None, :]
    np.add.at(acc, (np.broadcast_to(rows, xt.data.shape),
                    np.broadcast_to(cols, xt.data.shape)), xt.data)
    np.add.at(count, (np.broadcast_to(rows, xt.data.shape),
                      np.broadcast_to(cols, xt.data.shape)), 1.0)
    return acc / count


def _sqrt_filter(basis: SpectralBasis) -> np.ndarray:
    """Matrix square root U sqrt(Lambda) U^T with tiny-negative clamping."""
    lam = basis.eigenvalues
    if np.any(lam < 0.0):
        worst = float(lam.min())
        if worst < -EIGENVALUE_CLAMP_TOL:
            raise JTVError(
                f"eigenvalue {worst} too negative for a Laplacian square root"
            )
        warnings.warn(
            f"clamped negative eigenvalue {worst} to 0 before sqrt",
            RuntimeWarning,
            stacklevel=3,
        )
    root = np.sqrt(np.clip(lam, 0.0, None))
    return (basis.eigenvectors * root) @ basis.eigenvectors.T


@dataclass(frozen=True)
class GradientNorms:
    """Quadratic, total-variation, and mixed gradient norms."""

    l2_sq: float
    l1: float
    mixed: float


def gradient_norms(
    xt,
    j: JointGraph,
    p: float = 2.0,
    q: float = 2.0,
    mu_g: float = 1.0,
    mu_t: float = 1.0,
) -> GradientNorms:
    """Gradient-induced norms of a joint signal.

    l2_sq is the joint quadratic variation tr(X^T L_G X) + tr(X L_T X^T),
    identical to vec(X)^T L_J vec(X). l1 and the (p, q) mixed norm act on
    the vertex gradient L_G^{1/2} X and time gradient X L_T^{1/2}.
    """
    if p < 1.0 or q < 1.0 or mu_g < 0.0 or mu_t < 0.0:
        raise DimensionMismatchError("require p, q >= 1 and mu_g, mu_t >= 0")
    data = _signal_data(xt)
    if data.shape != (j.n, j.t):
        raise DimensionMismatchError(
            f"signal {data.shape} does not match joint graph ({j.n}, {j.t})"
        )
    l2_sq = float(
        np.trace(data.T @ j.vertex_laplacian @ data)
        + np.trace(data @ j.time_laplacian @ data.T)
    )
    grad_v = _sqrt_filter(j.vertex_basis) @ data
    grad_t = data @ _sqrt_filter(j.time_basis)
    l1 = float(np.abs(grad_v).sum() + np.abs(grad_t).sum())
    mixed = float(
        mu_g * (np.abs(grad_v) ** p).sum() + mu_t * (np.abs(grad_t) ** q).sum()
    )
    return GradientNorms(l2_sq=l2_sq, l1=l1, mixed=mixed)


def read_signal_csv(path) -> np.ndarray:
    """Read an N x T signal from headerless CSV, rejecting ragged rows."""
    rows = []
    width = None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            parts = line.split(",")
            if width is None:
                width = len(parts)
            elif len(parts) != width:
                raise DimensionMismatchError(
                    f"{path}:{lineno}: ragged row ({len(parts)} != {width} columns)"
                )
            try:
                rows.append([float(p) for p in parts])
            except ValueError as exc:
                raise DimensionMismatchError(f"{path}:{lineno}: {exc}") from exc
    if not rows:
        raise DimensionMismatchError(f"{path}: empty signal file")
    return np.array(rows, dtype=float)


def write_signal_csv(path, x: np.ndarray) -> None:
    """Write an N x T signal as headerless CSV (17 significant digits)."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    with open(path, "w", encoding="utf-8") as fh:
        for row in x:
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")
