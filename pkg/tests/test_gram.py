"""Gram pipeline: selectors, PSD square root, pair matrices, spectra."""

import numpy as np
import pytest

from hmmorder.gram import (
    build_gram,
    build_selectors,
    build_shifted_product,
    build_v,
    estimate_operator_matrix,
    low_rank_sqrt,
    psd_sqrt,
    singular_spectrum,
)
from hmmorder.kernels import KernelSpec, cross_gram
from hmmorder.series import ObservedSeries


def random_series(rng, n_points, dim=1, kind="linear"):
    if kind == "circular":
        return ObservedSeries.from_points(
            rng.uniform(0, 2 * np.pi, n_points), kind=kind
        )
    return ObservedSeries.from_points(np.cumsum(rng.standard_normal((n_points, dim)), 0))


class TestSelectors:
    def test_single_sequence(self):
        series = ObservedSeries.from_points(np.arange(3.0))
        sel = build_selectors(series)
        assert sel.first.tolist() == [0, 1]
        assert sel.second.tolist() == [1, 2]

    def test_two_sequences_skip_boundary(self):
        series = ObservedSeries(sequences=(np.arange(3.0), np.arange(2.0)))
        sel = build_selectors(series)
        assert sel.first.tolist() == [0, 1, 3]
        assert sel.second.tolist() == [1, 2, 4]
        assert sel.n_pairs == 3

    def test_minimal_sequence(self):
        series = ObservedSeries.from_points(np.array([1.0, 2.0]))
        sel = build_selectors(series)
        assert sel.first.tolist() == [0]
        assert sel.second.tolist() == [1]

    def test_pairs_are_consecutive(self):
        rng = np.random.default_rng(0)
        series = ObservedSeries(
            sequences=tuple(rng.standard_normal(k) for k in (5, 2, 7))
        )
        sel = build_selectors(series)
        assert np.array_equal(sel.second, sel.first + 1)
        assert sel.n_pairs == series.n_pairs


class TestBuildGram:
    def test_single_point_pair(self):
        series = ObservedSeries.from_points(np.array([0.7, 0.7]))
        spec = KernelSpec("gaussian", 0.5)
        w = build_gram(series, spec)
        assert w.shape == (2, 2)
        assert w[0, 0] == pytest.approx(cross_gram(spec, [0.7], [0.7]), rel=1e-14)

    def test_diagonal_value(self):
        rng = np.random.default_rng(1)
        series = random_series(rng, 12)
        h = 0.4
        w = build_gram(series, KernelSpec("gaussian", h))
        expect = (4 * np.pi * h * h) ** -0.5
        assert np.allclose(np.diag(w), expect, rtol=1e-13)

    def test_duplicated_point_rank_deficiency(self):
        y = np.array([0.0, 1.0, 1.0, 2.5])
        w = build_gram(ObservedSeries.from_points(y), KernelSpec("gaussian", 0.5))
        lam = np.linalg.eigvalsh(w)
        assert lam[0] == pytest.approx(0.0, abs=1e-12)

    def test_bitwise_symmetry(self):
        rng = np.random.default_rng(2)
        series = random_series(rng, 40, dim=3)
        w = build_gram(series, KernelSpec("gaussian", 0.8, dim=3))
        assert np.array_equal(w, w.T)

    def test_psd_up_to_tolerance(self):
        rng = np.random.default_rng(3)
        for kind, family in (("linear", "gaussian"), ("circular", "vonmises")):
            series = random_series(rng, 30, kind=kind)
            w = build_gram(series, KernelSpec(family, 0.5))
            lam = np.linalg.eigvalsh(w)
            assert lam[0] > -1e-10 * max(1.0, lam[-1])

    def test_dim_mismatch(self):
        series = ObservedSeries.from_points(np.zeros((5, 2)) + np.arange(5)[:, None])
        with pytest.raises(ValueError, match="dimension"):
            build_gram(series, KernelSpec("gaussian", 1.0, dim=1))


class TestPsdSqrt:
    def test_identity(self):
        assert np.allclose(psd_sqrt(np.eye(4)), np.eye(4), atol=1e-14)

    def test_diagonal(self):
        got = psd_sqrt(np.diag([4.0, 9.0]))
        assert np.allclose(got, np.diag([2.0, 3.0]), atol=1e-14)

    def test_roundtrip_random_psd(self):
        rng = np.random.default_rng(4)
        a = rng.standard_normal((10, 10))
        w = a.T @ a
        m = psd_sqrt(w)
        assert np.linalg.norm(m @ m - w) <= 1e-10 * np.linalg.norm(w)
        assert np.allclose(m, m.T)

    def test_reconstruction_tolerance_on_gram(self):
        rng = np.random.default_rng(5)
        series = random_series(rng, 80)
        w = build_gram(series, KernelSpec("gaussian", 0.3))
        m = psd_sqrt(w)
        assert np.linalg.norm(m @ m - w) <= 1e-8 * (1 + np.linalg.norm(w))

    def test_rejects_indefinite(self):
        w = np.diag([1.0, -0.5])
        with pytest.raises(np.linalg.LinAlgError, match="not PSD"):
            psd_sqrt(w)

    def test_rejects_asymmetric(self):
        w = np.array([[1.0, 0.5], [0.0, 1.0]])
        with pytest.raises(ValueError, match="symmetric"):
            psd_sqrt(w)


class TestPairMatrices:
    def test_identity_gram_single_pair(self):
        sel = build_selectors(ObservedSeries.from_points(np.array([0.0, 1.0])))
        v = build_v(np.eye(2), sel)
        assert v.shape == (1, 1)
        assert v[0, 0] == pytest.approx(1.0)

    def test_v_generally_asymmetric(self):
        rng = np.random.default_rng(6)
        series = random_series(rng, 3)
        w = build_gram(series, KernelSpec("gaussian", 0.5))
        m = psd_sqrt(w)
        v = build_v(m, build_selectors(series))
        assert np.linalg.norm(v - v.T) > 0

    def test_quadratic_scaling(self):
        rng = np.random.default_rng(7)
        series = random_series(rng, 6)
        m = psd_sqrt(build_gram(series, KernelSpec("gaussian", 0.5)))
        sel = build_selectors(series)
        v1 = build_v(m, sel)
        v2 = build_v(2.0 * m, sel)
        assert np.allclose(v2, 4.0 * v1, rtol=1e-12)
        s1 = np.linalg.svd(v1, compute_uv=False)
        s2 = np.linalg.svd(v2, compute_uv=False)
        assert np.allclose(s2, 4.0 * s1, rtol=1e-10)

    def test_v_equals_block_formula_single_sequence(self):
        rng = np.random.default_rng(8)
        series = random_series(rng, 9)
        m = psd_sqrt(build_gram(series, KernelSpec("gaussian", 0.6)))
        sel = build_selectors(series)
        n = series.n_pairs
        explicit = m[1:, 1:] @ m[:n, :n] / n
        assert np.array_equal(build_v(m, sel), explicit)

    def test_shifted_product_nonzero_spectrum_matches_two_block_form(self):
        # singular values of (1/n) M S M equal those of
        # (1/n) sqrt(W[sec, sec]) sqrt(W[fir, fir]); both express the
        # empirical operator spectrum.
        rng = np.random.default_rng(9)
        series = random_series(rng, 14)
        w = build_gram(series, KernelSpec("gaussian", 0.5))
        m = psd_sqrt(w)
        sel = build_selectors(series)
        n = sel.n_pairs
        b = build_shifted_product(m, sel)
        s_b = np.linalg.svd(b, compute_uv=False)[:n]
        gu = w[np.ix_(sel.second, sel.second)]
        gv = w[np.ix_(sel.first, sel.first)]
        two_block = psd_sqrt(gu) @ psd_sqrt(gv) / n
        s_t = np.linalg.svd(two_block, compute_uv=False)
        assert np.allclose(s_b, s_t, rtol=1e-9, atol=1e-12)


class TestSingularSpectrum:
    def test_diagonal(self):
        spec = singular_spectrum(np.diag([3.0, 1.0]), l_max=5)
        assert spec.sigma.tolist() == [3.0, 1.0]
        assert spec.frob_sq == pytest.approx(10.0)

    def test_zero_matrix(self):
        spec = singular_spectrum(np.zeros((4, 4)), l_max=4)
        assert np.all(spec.sigma == 0)
        assert spec.frob_sq == 0.0

    def test_frobenius_identity_full_svd(self):
        rng = np.random.default_rng(10)
        v = rng.standard_normal((20, 20))
        spec = singular_spectrum(v, l_max=20)
        assert np.sum(spec.sigma**2) == pytest.approx(spec.frob_sq, rel=1e-10)

    def test_truncation_keeps_exact_frobenius(self):
        rng = np.random.default_rng(11)
        v = rng.standard_normal((30, 30))
        spec = singular_spectrum(v, l_max=5)
        assert spec.sigma.size == 5
        assert spec.frob_sq == pytest.approx(np.sum(v * v), rel=1e-14)

    def test_stored_mass_below_total(self):
        rng = np.random.default_rng(12)
        v = rng.standard_normal((15, 15))
        spec = singular_spectrum(v, l_max=7)
        assert np.sum(spec.sigma**2) <= spec.frob_sq * (1 + 1e-12)

    def test_iterative_path_matches_full(self):
        import hmmorder.gram as gram_mod

        rng = np.random.default_rng(13)
        v = rng.standard_normal((60, 60))
        full = singular_spectrum(v, l_max=6)
        old = gram_mod.FULL_SVD_MAX_N
        gram_mod.FULL_SVD_MAX_N = 10
        try:
            trunc = singular_spectrum(v, l_max=6)
        finally:
            gram_mod.FULL_SVD_MAX_N = old
        assert np.allclose(trunc.sigma, full.sigma, rtol=1e-8)
        assert trunc.frob_sq == full.frob_sq


class TestEstimateOperatorMatrix:
    def test_reversal_preserves_spectrum(self):
        # reversing time turns the empirical pair density into its
        # transpose, i.e. the operator into its adjoint, so the
        # singular values are invariant.
        rng = np.random.default_rng(14)
        y = np.cumsum(rng.standard_normal(30))
        spec = KernelSpec("gaussian", 0.5)
        _, fwd = estimate_operator_matrix(ObservedSeries.from_points(y), spec, l_max=5)
        _, rev = estimate_operator_matrix(
            ObservedSeries.from_points(y[::-1].copy()), spec, l_max=5
        )
        assert np.allclose(fwd.sigma, rev.sigma, rtol=1e-9)

    def test_pooling_differs_from_concatenation(self):
        rng = np.random.default_rng(15)
        a, b = rng.standard_normal(10), rng.standard_normal(8) + 3.0
        spec = KernelSpec("gaussian", 0.5)
        _, pooled = estimate_operator_matrix(
            ObservedSeries(sequences=(a, b)), spec, l_max=5
        )
        _, merged = estimate_operator_matrix(
            ObservedSeries.from_points(np.concatenate([a, b])), spec, l_max=5
        )
        assert pooled.n_pairs == 16
        assert merged.n_pairs == 17
        assert not np.allclose(pooled.sigma, merged.sigma, rtol=1e-8)

    def test_degenerate_identical_points(self):
        series = ObservedSeries.from_points(np.zeros(12))
        _, spec = estimate_operator_matrix(series, KernelSpec("gaussian", 0.5), l_max=5)
        assert spec.sigma[0] > 0
        assert spec.sigma[1] == pytest.approx(0.0, abs=1e-10 * spec.sigma[0])


class TestLowRankSqrt:
    def test_exact_recovery_of_low_rank(self):
        rng = np.random.default_rng(16)
        base = rng.standard_normal((5, 5))
        w_small = base.T @ base
        w = np.kron(np.ones((3, 3)), w_small)  # rank 5, size 15
        lr = low_rank_sqrt(w, target_rank=5)
        assert np.linalg.norm(lr.matrix @ lr.matrix - w) <= 1e-8 * np.linalg.norm(w)
        # the trace-identity residual bottoms out at sqrt(eps)
        assert lr.rel_error <= 5e-8

    def test_full_rank_limit_matches_psd_sqrt(self):
        rng = np.random.default_rng(17)
        a = rng.standard_normal((12, 12))
        w = a.T @ a
        lr = low_rank_sqrt(w, target_rank=12)
        assert np.allclose(lr.matrix, psd_sqrt(w), atol=1e-8)

    def test_overrequested_rank_warns_and_truncates(self):
        rng = np.random.default_rng(18)
        base = rng.standard_normal((4, 10))
        w = base.T @ base  # rank 4, size 10
        with pytest.warns(UserWarning, match="numerical rank"):
            lr = low_rank_sqrt(w, target_rank=7)
        assert lr.rank == 4

    def test_factored_route_matches_densified(self):
        from hmmorder.gram import compressed_shifted_product

        rng = np.random.default_rng(20)
        y = np.concatenate([rng.normal(m, 1.0, 40) for m in (-3.0, 3.0)])
        rng.shuffle(y)
        series = ObservedSeries.from_points(y)
        w = build_gram(series, KernelSpec("gaussian", 0.5))
        sel = build_selectors(series)
        lr = low_rank_sqrt(w, target_rank=20)
        dense_b = build_shifted_product(lr.matrix, sel)
        s_dense = np.linalg.svd(dense_b, compute_uv=False)[:8]
        inner = compressed_shifted_product(lr, sel)
        s_inner = np.linalg.svd(inner, compute_uv=False)[:8]
        assert np.allclose(s_dense, s_inner, rtol=1e-10, atol=1e-14)

    @pytest.mark.filterwarnings("ignore::UserWarning")
    def test_estimate_operator_matrix_accepts_factored_sqrt(self):
        rng = np.random.default_rng(21)
        y = np.cumsum(rng.standard_normal(60))
        series = ObservedSeries.from_points(y)
        spec = KernelSpec("gaussian", 0.5)
        w = build_gram(series, spec)
        lr = low_rank_sqrt(w, target_rank=35)
        _, fast = estimate_operator_matrix(series, spec, l_max=6, gram_sqrt=lr,
                                           keep_pair_matrix=False)
        _, dense = estimate_operator_matrix(series, spec, l_max=6,
                                            gram_sqrt=lr.matrix,
                                            keep_pair_matrix=False)
        assert np.allclose(fast.sigma, dense.sigma, rtol=1e-9)
        assert fast.frob_sq == pytest.approx(dense.frob_sq, rel=1e-9)

    @pytest.mark.filterwarnings("ignore::UserWarning")
    def test_pipeline_top_sigmas_close_to_exact(self):
        # smooth-kernel Gram matrices have low numerical rank, so the
        # requested rank may exceed it; the truncation warning is expected
        rng = np.random.default_rng(19)
        y = np.concatenate(
            [rng.normal(m, 1.0, 120) for m in (-4.0, 0.0, 4.0)]
        )
        rng.shuffle(y)
        series = ObservedSeries.from_points(y)
        kspec = KernelSpec("gaussian", 0.6)
        w = build_gram(series, kspec)
        sel = build_selectors(series)
        exact = np.linalg.svd(
            build_shifted_product(psd_sqrt(w), sel), compute_uv=False
        )[:10]
        lr = low_rank_sqrt(w, target_rank=100)
        approx = np.linalg.svd(
            build_shifted_product(lr.matrix, sel), compute_uv=False
        )[:10]
        assert np.all(np.abs(approx - exact) <= 0.01 * exact + 1e-12)
