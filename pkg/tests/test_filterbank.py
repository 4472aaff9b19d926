"""Kernels, PR conditions, per-domain and joint analysis/synthesis."""
import json
import math

import numpy as np
import pytest

from jtvfb.errors import DimensionMismatchError, NotBipartiteError
from jtvfb.extension import extend_graph, greedy_coloring, harary_bipartition, ring_extend
from jtvfb.filterbank import (
    KernelPair,
    analyze_domain,
    dump_subbands,
    joint_analyze,
    joint_synthesize,
    joint_two_term,
    meyer_qmf_kernels,
    spectral_filter,
    synthesize_domain,
    verify_pr,
)
from jtvfb.graphs import (
    Bipartition,
    SpectralBasis,
    bfs_two_coloring,
    build_graph,
    eigendecompose,
    normalized_laplacian,
    ring_graph,
)
from jtvfb.joint import build_joint, extend_signal

from conftest import random_connected_graph, rel_error

KP = meyer_qmf_kernels()


def k2_basis():
    return eigendecompose(normalized_laplacian(build_graph(2, [(0, 1, 1.0)])))


def triangle():
    return build_graph(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)])


class TestMeyerKernels:
    def test_band_edges(self):
        assert KP.h0(np.array([0.0]))[0] == pytest.approx(math.sqrt(2.0))
        assert KP.h0(np.array([2.0]))[0] == 0.0

    def test_midpoint(self):
        # ramp polynomial gives nu(1/2) = 1/2, so h0(1) = sqrt(2) cos(pi/4)
        assert KP.h0(np.array([1.0]))[0] == pytest.approx(1.0)

    def test_power_complement_at_0p9(self):
        lam = np.array([0.9])
        total = KP.h0(lam) ** 2 + KP.h0(2.0 - lam) ** 2
        assert total[0] == pytest.approx(2.0, abs=1e-12)

    def test_qmf_relations_on_grid(self):
        lam = np.linspace(0.0, 2.0, 101)
        assert np.allclose(KP.h1(lam), KP.h0(2.0 - lam))
        assert np.allclose(KP.g0(lam), KP.h0(lam))
        assert np.allclose(KP.g1(lam), KP.h1(lam))


class TestVerifyPR:
    def test_meyer_passes(self):
        report = verify_pr(KP)
        assert report.passed
        assert report.identity_violation <= 1e-12
        assert report.alias_violation <= 1e-12

    def test_lowpass_only_pair_fails(self):
        one = lambda lam: np.ones_like(np.asarray(lam, dtype=float))
        zero = lambda lam: np.zeros_like(np.asarray(lam, dtype=float))
        report = verify_pr(KernelPair(h0=one, h1=zero, g0=one, g1=zero))
        assert report.identity_violation == pytest.approx(1.0)
        assert not report.passed

    def test_all_ones_pair_passes(self):
        one = lambda lam: np.ones_like(np.asarray(lam, dtype=float))
        report = verify_pr(KernelPair(h0=one, h1=one, g0=one, g1=one))
        assert report.identity_violation == 0.0
        assert report.alias_violation == 0.0
        assert report.passed

    def test_scaled_pair_violation(self):
        scale = 0.9

        def mul(f):
            return lambda lam: scale * f(lam)

        report = verify_pr(
            KernelPair(h0=mul(KP.h0), h1=mul(KP.h1), g0=mul(KP.g0), g1=mul(KP.g1))
        )
        assert report.identity_violation == pytest.approx(2.0 - 2.0 * scale**2)


class TestSpectralFilter:
    def test_constant_kernel_is_identity(self):
        g = random_connected_graph(9, seed=0)
        basis = eigendecompose(normalized_laplacian(g))
        h = spectral_filter(basis, lambda lam: np.ones_like(lam))
        assert np.max(np.abs(h - np.eye(9))) <= 1e-10

    def test_linear_kernel_recovers_laplacian(self):
        g = random_connected_graph(9, seed=1)
        lap = normalized_laplacian(g)
        h = spectral_filter(eigendecompose(lap), lambda lam: lam)
        assert np.max(np.abs(h - lap)) <= 1e-9

    def test_h0_on_k2_eigenvalues(self):
        h = spectral_filter(k2_basis(), KP.h0)
        assert np.allclose(
            np.sort(np.linalg.eigvalsh(h)), [0.0, math.sqrt(2.0)], atol=1e-12
        )


class TestAnalyzeDomain:
    def test_zero_signal(self):
        basis = k2_basis()
        bip = Bipartition(low={0}, high={1})
        y0, y1 = analyze_domain(np.zeros((2, 3)), basis, bip, KP)
        assert not y0.any() and not y1.any()

    def test_matches_direct_operator_sum(self, rng):
        g = random_connected_graph(8, seed=2)
        bip = harary_bipartition(g, seed=0)[1]
        basis = eigendecompose(normalized_laplacian(g))
        x = rng.standard_normal((8, 4))
        y0, y1 = analyze_domain(x, basis, bip, KP)
        c = np.diag(bip.signs())
        h0 = spectral_filter(basis, KP.h0)
        h1 = spectral_filter(basis, KP.h1)
        direct = ((np.eye(8) - c) @ h0 + (np.eye(8) + c) @ h1) @ x / 2.0
        assert np.max(np.abs((y0 + y1) - direct)) <= 1e-12

    def test_k2_constant_input_channel0(self):
        basis = k2_basis()
        bip = Bipartition(low={0}, high={1})
        y0, _ = analyze_domain(np.array([[2.0], [2.0]]), basis, bip, KP)
        assert y0[0, 0] == 0.0  # low node zeroed by the (I-C)/2 sampler
        assert y0[1, 0] == pytest.approx(2.0 * math.sqrt(2.0))


class TestSynthesizeDomain:
    def test_k2_roundtrip_exact(self, rng):
        basis = k2_basis()
        bip = Bipartition(low={0}, high={1})
        x = rng.standard_normal((2, 3))
        xr = synthesize_domain(*analyze_domain(x, basis, bip, KP), basis, KP)
        assert np.max(np.abs(xr - x)) <= 1e-12

    def test_ring8_roundtrip(self, rng):
        g = ring_graph(8)
        basis = eigendecompose(normalized_laplacian(g))
        bip = bfs_two_coloring(g)
        x = rng.standard_normal((8, 5))
        xr = synthesize_domain(*analyze_domain(x, basis, bip, KP), basis, KP)
        assert rel_error(xr, x) <= 1e-10

    def test_time_axis_roundtrip(self, rng):
        g = ring_graph(6)
        basis = eigendecompose(normalized_laplacian(g))
        bip = bfs_two_coloring(g)
        x = rng.standard_normal((4, 6))
        y0, y1 = analyze_domain(x, basis, bip, KP, axis="time")
        xr = synthesize_domain(y0, y1, basis, KP, axis="time")
        assert rel_error(xr, x) <= 1e-10

    def test_non_bipartite_roundtrip_fails(self, rng):
        # negative control: triangle with its full Laplacian
        g = triangle()
        basis = eigendecompose(normalized_laplacian(g))
        bip = harary_bipartition(g, seed=0)[1]
        x = rng.standard_normal((3, 4))
        xr = synthesize_domain(*analyze_domain(x, basis, bip, KP), basis, KP)
        assert rel_error(xr, x) > 1e-3


def oversampled_pair(seed: int, n: int = 10, t: int = 7):
    g = random_connected_graph(n, seed=seed)
    coloring = greedy_coloring(g)
    ext = extend_graph(g, coloring, max(1, coloring.k - 1))
    text = ring_extend(t)
    return ext, text, build_joint(ext, text)


class TestJointAnalyze:
    def test_retained_counts_partition_joint_nodes(self, rng):
        ext, text, j = oversampled_pair(seed=3)
        x = extend_signal(rng.standard_normal((10, 7)), ext, text, "copy")
        bands = joint_analyze(x, j, ext.bipartition, text.bipartition, KP)
        total = 0
        for (kv, kt), band in bands.bands.items():
            rows = bands.retained_rows(kv)
            cols = bands.retained_cols(kt)
            total += len(rows) * len(cols)
            mask = np.ones(band.shape, dtype=bool)
            mask[np.ix_(rows, cols)] = False
            assert not band[mask].any()  # exact zeros off the retained set
        assert total == j.n * j.t

    def test_zero_input(self):
        ext, text, j = oversampled_pair(seed=4)
        x = extend_signal(np.zeros((10, 7)), ext, text, "zero")
        bands = joint_analyze(x, j, ext.bipartition, text.bipartition, KP)
        assert all(not band.any() for band in bands.bands.values())

    def test_rejects_non_bipartite(self, rng):
        g = triangle()
        j = build_joint(g, ring_graph(4))
        bip = harary_bipartition(g, seed=0)[1]
        tb = bfs_two_coloring(ring_graph(4))
        with pytest.raises(NotBipartiteError):
            joint_analyze(rng.standard_normal((3, 4)), j, bip, tb, KP)


class TestJointSynthesize:
    def test_roundtrip_extended_ring_and_triangle(self, rng):
        tri = triangle()
        ext = extend_graph(tri, greedy_coloring(tri), 2)
        text = ring_extend(5)
        j = build_joint(ext, text)
        x = extend_signal(rng.standard_normal((3, 5)), ext, text, "copy")
        bands = joint_analyze(x, j, ext.bipartition, text.bipartition, KP)
        back = joint_synthesize(bands, j, KP)
        assert rel_error(back, x.data) <= 1e-10

    def test_roundtrip_even_rings(self, rng):
        j = build_joint(ring_graph(8), ring_graph(6))
        bg = bfs_two_coloring(ring_graph(8))
        bt = bfs_two_coloring(ring_graph(6))
        x = rng.standard_normal((8, 6))
        bands = joint_analyze(x, j, bg, bt, KP)
        assert rel_error(joint_synthesize(bands, j, KP), x) <= 1e-10

    def test_zero_subbands(self):
        ext, text, j = oversampled_pair(seed=5)
        x = extend_signal(np.zeros((10, 7)), ext, text, "zero")
        bands = joint_analyze(x, j, ext.bipartition, text.bipartition, KP)
        assert not joint_synthesize(bands, j, KP).any()


class TestJointTwoTerm:
    def test_vec_form_agrees(self, rng):
        ext, text, j = oversampled_pair(seed=6, n=8, t=5)
        x = extend_signal(rng.standard_normal((8, 5)), ext, text, "copy")
        result = joint_two_term(x, j, ext.bipartition, text.bipartition, KP)
        assert result.vec_form_max_diff is not None
        assert result.vec_form_max_diff <= 1e-10

    def test_zero_input(self):
        ext, text, j = oversampled_pair(seed=7)
        x = extend_signal(np.zeros((10, 7)), ext, text, "zero")
        result = joint_two_term(x, j, ext.bipartition, text.bipartition, KP)
        assert not result.data.any()
        assert result.residual_rel == 0.0

    def test_residual_recorded_not_asserted(self, rng):
        # the literal two-term form is not the identity; just record it
        ext, text, j = oversampled_pair(seed=8)
        x = extend_signal(rng.standard_normal((10, 7)), ext, text, "copy")
        result = joint_two_term(x, j, ext.bipartition, text.bipartition, KP)
        assert np.isfinite(result.residual_rel)
        assert result.residual_rel >= 0.0


class TestFilterBankInvariants:
    def test_pr_roundtrip_many_graphs_both_fills(self, rng):
        for seed in range(50):
            n = int(8 + seed % 33)  # up to 40
            t = 6 + seed % 7  # 6..12
            g = random_connected_graph(n, seed=seed)
            coloring = greedy_coloring(g)
            ext = extend_graph(g, coloring, max(1, coloring.k - 1))
            text = ring_extend(t)
            j = build_joint(ext, text)
            x = rng.standard_normal((n, t))
            for fill in ("zero", "copy"):
                lifted = extend_signal(x, ext, text, fill)
                bands = joint_analyze(
                    lifted, j, ext.bipartition, text.bipartition, KP
                )
                back = joint_synthesize(bands, j, KP)
                assert rel_error(back, lifted.data) <= 1e-10

    def test_channel_identity(self):
        for seed in range(10):
            g = random_connected_graph(int(6 + seed * 2), seed=seed)
            coloring = greedy_coloring(g)
            ext = extend_graph(g, coloring, max(1, coloring.k - 1))
            basis = eigendecompose(normalized_laplacian(ext.extended))
            c = np.diag(ext.bipartition.signs())
            h0 = spectral_filter(basis, KP.h0)
            h1 = spectral_filter(basis, KP.h1)
            g0 = spectral_filter(basis, KP.g0)
            g1 = spectral_filter(basis, KP.g1)
            eye = np.eye(ext.n1)
            op = 0.5 * (g0 @ (eye - c) @ h0 + g1 @ (eye + c) @ h1)
            assert np.max(np.abs(op - eye)) <= 1e-10

    def test_spectral_folding(self):
        for t in (4, 6, 8):
            g = ring_graph(t)
            lap = normalized_laplacian(g)
            basis = eigendecompose(lap)
            c = np.diag(bfs_two_coloring(g).signs())
            h = spectral_filter(basis, KP.h0)
            folded = spectral_filter(basis, lambda lam: KP.h0(2.0 - lam))
            assert np.max(np.abs(c @ h @ c - folded)) <= 1e-9

    def test_basis_independence(self, rng):
        g = ring_graph(8)  # degenerate eigenvalues force real basis freedom
        lap = normalized_laplacian(g)
        basis = eigendecompose(lap)
        lam = basis.eigenvalues
        u2 = -basis.eigenvectors.copy()
        start = 0
        while start < len(lam):
            stop = start + 1
            while stop < len(lam) and lam[stop] - lam[stop - 1] < 1e-9:
                stop += 1
            if stop - start > 1:
                block = rng.standard_normal((stop - start, stop - start))
                q, _ = np.linalg.qr(block)
                u2[:, start:stop] = u2[:, start:stop] @ q
            start = stop
        alt = SpectralBasis(eigenvalues=lam, eigenvectors=u2)
        assert np.max(np.abs((u2 * lam) @ u2.T - lap)) <= 1e-9
        for kernel in (KP.h0, KP.h1):
            a = spectral_filter(basis, kernel)
            b = spectral_filter(alt, kernel)
            assert np.max(np.abs(a - b)) <= 1e-9


class TestSubbandDump:
    def test_files_and_manifest(self, tmp_path, rng):
        ext, text, j = oversampled_pair(seed=9, n=6, t=5)
        x = extend_signal(rng.standard_normal((6, 5)), ext, text, "copy")
        bands = joint_analyze(x, j, ext.bipartition, text.bipartition, KP)
        manifest = dump_subbands(bands, tmp_path)
        for kv in (0, 1):
            for kt in (0, 1):
                assert (tmp_path / f"band_v{kv}_t{kt}.csv").exists()
        stored = json.loads((tmp_path / "subbands.json").read_text())
        assert stored == manifest
        assert set(stored["retained_rows"]) == {"0", "1"}
