"""Two-channel spectral filter banks on bipartite graphs.

Kernels live on [0, 2], the spectral range of symmetric normalized
Laplacians. Perfect reconstruction holds when

    g0(x) h0(x) + g1(x) h1(x) = 2
    g0(x) h0(2-x) - g1(x) h1(2-x) = 0

for every eigenvalue x, in both the vertex and the time domain.

Channel convention (kept exactly as in the reconstruction formula this
implements, which differs from much of the filter-bank literature):
channel 0 applies the h0/g0 kernels and its sampler (I - C)/2 retains
the HIGH set of the bipartition; channel 1 applies h1/g1 and (I + C)/2
retains the LOW set, where C is +1 on low and -1 on high.

Joint analysis is a separable cascade: two-channel analysis along time,
then along the vertex axis of each time subband, giving four subbands
keyed (vertex channel, time channel). The cascade provably reconstructs
on bipartite factors; the literal two-term reconstruction (half the sum
of the two matched channel products) is provided for study and its
residual is reported, not asserted.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from .errors import DimensionMismatchError, NotBipartiteError
from .graphs import Bipartition, Graph, SpectralBasis, check_bipartite
from .joint import ExtendedJointSignal, JointGraph, _signal_data

PR_GRID_POINTS = 2001
PR_TOL = 1e-12

Kernel = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class KernelPair:
    """The four spectral kernels of a two-channel bank."""

    h0: Kernel
    h1: Kernel
    g0: Kernel
    g1: Kernel
    name: str = "custom"


@dataclass(frozen=True)
class PRReport:
    """Worst-case violations of the two reconstruction conditions."""

    identity_violation: float
    alias_violation: float
    passed: bool


def _meyer_ramp(x: np.ndarray) -> np.ndarray:
    # nu(x) = x^4 (35 - 84x + 70x^2 - 20x^3); nu(x) + nu(1-x) = 1 on [0, 1]
    return x**4 * (35.0 - 84.0 * x + 70.0 * x**2 - 20.0 * x**3)


def _meyer_lowpass(lam: np.ndarray) -> np.ndarray:
    lam = np.asarray(lam, dtype=float)
    out = np.zeros_like(lam)
    flat = lam <= 2.0 / 3.0
    out[flat] = np.sqrt(2.0)
    rolloff = (lam > 2.0 / 3.0) & (lam < 4.0 / 3.0)
    x = 1.5 * lam[rolloff] - 1.0
    out[rolloff] = np.sqrt(2.0) * np.cos(0.5 * np.pi * _meyer_ramp(x))
    return out


def meyer_qmf_kernels() -> KernelPair:
    """Meyer-style QMF pair: h1(x) = h0(2-x), g0 = h0, g1 = h1.

    Satisfies both reconstruction conditions analytically because the
    ramp polynomial obeys nu(x) + nu(1-x) = 1, so h0(x)^2 + h0(2-x)^2 = 2.
    """

    def h0(lam):
        return _meyer_lowpass(np.asarray(lam, dtype=float))

    def h1(lam):
        return _meyer_lowpass(2.0 - np.asarray(lam, dtype=float))

    return KernelPair(h0=h0, h1=h1, g0=h0, g1=h1, name="meyer-qmf")


def verify_pr(kp: KernelPair, grid_points: int = PR_GRID_POINTS) -> PRReport:
    """Evaluate both reconstruction conditions on a uniform [0, 2] grid.

    The vertex and time conditions range over the same [0, 2] domain, so
    one grid covers both.
    """
    lam = np.linspace(0.0, 2.0, grid_points)
    identity = kp.g0(lam) * kp.h0(lam) + kp.g1(lam) * kp.h1(lam)
    alias = kp.g0(lam) * kp.h0(2.0 - lam) - kp.g1(lam) * kp.h1(2.0 - lam)
    identity_violation = float(np.max(np.abs(identity - 2.0)))
    alias_violation = float(np.max(np.abs(alias)))
    return PRReport(
        identity_violation=identity_violation,
        alias_violation=alias_violation,
        passed=identity_violation <= PR_TOL and alias_violation <= PR_TOL,
    )


def spectral_filter(basis: SpectralBasis, kernel: Kernel) -> np.ndarray:
    """Matrix function U diag(kernel(lambda)) U^T of the decomposed operator."""
    response = np.asarray(kernel(basis.eigenvalues), dtype=float)
    return (basis.eigenvectors * response) @ basis.eigenvectors.T


def _channel_samplers(bip: Bipartition) -> tuple[np.ndarray, np.ndarray]:
    """Diagonal 0/1 samplers (I - C)/2 and (I + C)/2 as vectors."""
    c = bip.signs()
    return (1.0 - c) / 2.0, (1.0 + c) / 2.0


def analyze_domain(
    x: np.ndarray,
    basis: SpectralBasis,
    bip: Bipartition,
    kp: KernelPair,
    axis: str = "vertex",
) -> tuple[np.ndarray, np.ndarray]:
    """Two-channel analysis along one axis.

    Vertex axis: y_k = D_k H_k X with D_0 = (I-C)/2, D_1 = (I+C)/2.
    Time axis: the mirrored right-multiplication X H_k D_k.
    """
    x = np.asarray(x, dtype=float)
    h0 = spectral_filter(basis, kp.h0)
    h1 = spectral_filter(basis, kp.h1)
    d0, d1 = _channel_samplers(bip)
    if axis == "vertex":
        if x.shape[0] != basis.dim:
            raise DimensionMismatchError(
                f"signal has {x.shape[0]} rows, basis dim {basis.dim}"
            )
        return d0[:, None] * (h0 @ x), d1[:, None] * (h1 @ x)
    if axis == "time":
        if x.shape[1] != basis.dim:
            raise DimensionMismatchError(
                f"signal has {x.shape[1]} columns, basis dim {basis.dim}"
            )
        return (x @ h0) * d0[None, :], (x @ h1) * d1[None, :]
    raise DimensionMismatchError(f"unknown axis {axis!r}")


def synthesize_domain(
    y0: np.ndarray,
    y1: np.ndarray,
    basis: SpectralBasis,
    kp: KernelPair,
    axis: str = "vertex",
) -> np.ndarray:
    """Two-channel synthesis along one axis: G0 y0 + G1 y1 (mirrored for time)."""
    y0 = np.asarray(y0, dtype=float)
    y1 = np.asarray(y1, dtype=float)
    if y0.shape != y1.shape:
        raise DimensionMismatchError(f"subband shapes differ: {y0.shape} {y1.shape}")
    g0 = spectral_filter(basis, kp.g0)
    g1 = spectral_filter(basis, kp.g1)
    if axis == "vertex":
        if y0.shape[0] != basis.dim:
            raise DimensionMismatchError(
                f"subbands have {y0.shape[0]} rows, basis dim {basis.dim}"
            )
        return g0 @ y0 + g1 @ y1
    if axis == "time":
        if y0.shape[1] != basis.dim:
            raise DimensionMismatchError(
                f"subbands have {y0.shape[1]} columns, basis dim {basis.dim}"
            )
        return y0 @ g0 + y1 @ g1
    raise DimensionMismatchError(f"unknown axis {axis!r}")


@dataclass(frozen=True, eq=False)
class SubbandCoefficients:
    """Four full-size subbands keyed (vertex channel, time channel).

    Each band is zero outside its retained row/column set: channel 0
    retains the high set, channel 1 the low set of its bipartition.
    """

    bands: dict[tuple[int, int], np.ndarray]
    vertex_bipartition: Bipartition
    time_bipartition: Bipartition

    def retained_rows(self, kv: int) -> list[int]:
        b = self.vertex_bipartition
        return sorted(b.high if kv == 0 else b.low)

    def retained_cols(self, kt: int) -> list[int]:
        b = self.time_bipartition
        return sorted(b.high if kt == 0 else b.low)

    def map_bands(self, fn) -> "SubbandCoefficients":
        """New coefficients with ``fn(key, band)`` applied to every band."""
        return SubbandCoefficients(
            bands={k: fn(k, v) for k, v in self.bands.items()},
            vertex_bipartition=self.vertex_bipartition,
            time_bipartition=self.time_bipartition,
        )


def _require_bipartite_factors(j: JointGraph, bg: Bipartition, bt: Bipartition):
    if not check_bipartite(j.vertex_graph, bg):
        raise NotBipartiteError("vertex bipartition does not certify bipartiteness")
    if not check_bipartite(j.time_graph, bt):
        raise NotBipartiteError("time bipartition does not certify bipartiteness")


def joint_analyze(
    xt,
    j: JointGraph,
    bg: Bipartition,
    bt: Bipartition,
    kp: KernelPair,
    require_bipartite: bool = True,
) -> SubbandCoefficients:
    """Cascaded separable analysis: time channels, then vertex channels.

    ``require_bipartite=False`` skips the factor bipartiteness check; the
    output is then generally not reconstructable (used as a negative
    control for the bipartiteness requirement).
    """
    if require_bipartite:
        _require_bipartite_factors(j, bg, bt)
    data = _signal_data(xt)
    if data.shape != (j.n, j.t):
        raise DimensionMismatchError(
            f"signal {data.shape} does not match joint graph ({j.n}, {j.t})"
        )
    t0, t1 = analyze_domain(data, j.time_basis, bt, kp, axis="time")
    bands = {}
    for kt, tb in ((0, t0), (1, t1)):
        v0, v1 = analyze_domain(tb, j.vertex_basis, bg, kp, axis="vertex")
        bands[(0, kt)] = v0
        bands[(1, kt)] = v1
    return SubbandCoefficients(
        bands=bands, vertex_bipartition=bg, time_bipartition=bt
    )


def joint_synthesize(
    s: SubbandCoefficients,
    j: JointGraph,
    kp: KernelPair,
) -> np.ndarray:
    """Inverse of the cascade: vertex synthesis per time channel, then time."""
    shapes = {b.shape for b in s.bands.values()}
    if shapes != {(j.n, j.t)}:
        raise DimensionMismatchError(
            f"subband shapes {shapes} do not match joint graph ({j.n}, {j.t})"
        )
    time_bands = []
    for kt in (0, 1):
        time_bands.append(
            synthesize_domain(
                s.bands[(0, kt)], s.bands[(1, kt)], j.vertex_basis, kp, axis="vertex"
            )
        )
    return synthesize_domain(
        time_bands[0], time_bands[1], j.time_basis, kp, axis="time"
    )


@dataclass(frozen=True, eq=False)
class TwoTermResult:
    """Literal two-term reconstruction and its internal consistency."""

    data: np.ndarray
    vec_form_max_diff: float | None
    residual_rel: float


def joint_two_term(
    xt,
    j: JointGraph,
    bg: Bipartition,
    bt: Bipartition,
    kp: KernelPair,
    require_bipartite: bool = True,
    verify_vec_form: bool | None = None,
) -> TwoTermResult:
    """Two-term reconstruction 1/2 Q0_G X Q0_T^T + 1/2 Q1_G X Q1_T^T.

    Q0 = G0 (I - C) H0 and Q1 = G1 (I + C) H1 per domain, exactly as
    written in the vectorized composite-operator form. The vectorized
    Kronecker evaluation is compared against the matrix form when the
    joint size permits materialization; the relative deviation of the
    output from the input is reported, not asserted (this form does not
    reduce to the identity under the per-domain conditions).
    """
    if require_bipartite:
        _require_bipartite_factors(j, bg, bt)
    data = _signal_data(xt)
    if data.shape != (j.n, j.t):
        raise DimensionMismatchError(
            f"signal {data.shape} does not match joint graph ({j.n}, {j.t})"
        )
    cg = bg.signs()
    ct = bt.signs()

    def q(basis, signs, h, g, sign):
        hm = spectral_filter(basis, h)
        gm = spectral_filter(basis, g)
        return gm @ ((1.0 + sign * signs)[:, None] * hm)

    q0g = q(j.vertex_basis, cg, kp.h0, kp.g0, -1.0)
    q1g = q(j.vertex_basis, cg, kp.h1, kp.g1, +1.0)
    q0t = q(j.time_basis, ct, kp.h0, kp.g0, -1.0)
    q1t = q(j.time_basis, ct, kp.h1, kp.g1, +1.0)
    out = 0.5 * (q0g @ data @ q0t.T) + 0.5 * (q1g @ data @ q1t.T)

    if verify_vec_form is None:
        verify_vec_form = j.n * j.t <= 10_000
    vec_diff = None
    if verify_vec_form:
        x_vec = data.ravel(order="F")
        vec_out = 0.5 * (np.kron(q0t, q0g) @ x_vec) + 0.5 * (
            np.kron(q1t, q1g) @ x_vec
        )
        vec_diff = float(np.max(np.abs(vec_out - out.ravel(order="F"))))

    denom = float(np.linalg.norm(data))
    residual = float(np.linalg.norm(out - data)) / denom if denom > 0 else 0.0
    return TwoTermResult(data=out, vec_form_max_diff=vec_diff, residual_rel=residual)


def dump_subbands(s: SubbandCoefficients, directory) -> dict:
    """Write one CSV per subband plus a JSON manifest of retained indices.

    Files are named ``band_v{0|1}_t{0|1}.csv``; the manifest records the
    retained row/column indices per channel.
    """
    from .joint import write_signal_csv

    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    manifest = {
        "bands": {},
        "retained_rows": {str(kv): s.retained_rows(kv) for kv in (0, 1)},
        "retained_cols": {str(kt): s.retained_cols(kt) for kt in (0, 1)},
    }
    for (kv, kt), band in sorted(s.bands.items()):
        name = f"band_v{kv}_t{kt}.csv"
        write_signal_csv(directory / name, band)
        manifest["bands"][f"v{kv}_t{kt}"] = name
    with open(directory / "subbands.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
    return manifest
