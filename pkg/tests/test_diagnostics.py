import numpy as np
import pytest

from kernelrep import (
    KernelAutoencoder,
    KernelPCA,
    KernelSpec,
    SimpleContrastive,
    SpectralContrastive,
    bound_report,
    complexity_terms,
    make_triplets,
    model_norms,
    unit_sphere_kernel_max,
)


class TestComplexityTerms:
    def test_gaussian_closed_forms(self):
        rng = np.random.default_rng(0)
        n, h = 12, 2
        t = make_triplets(rng.normal(size=(n, 3)), seed=0)
        alpha, kappa = complexity_terms(t, KernelSpec("gaussian", 1.0), h)
        assert kappa == 1.0
        assert alpha == pytest.approx(3 * np.sqrt(h * n), rel=1e-12)

    def test_linear_kappa_is_max_squared_norm(self):
        rng = np.random.default_rng(1)
        t = make_triplets(rng.normal(size=(8, 4)), seed=1)
        _, kappa = complexity_terms(t, KernelSpec("linear"), 2)
        expected = max(
            np.max(np.sum(m**2, axis=1)) for m in (t.anchors, t.positives, t.negatives)
        )
        assert kappa == pytest.approx(expected, rel=1e-12)

    def test_alpha_scales_as_sqrt_h(self):
        t = make_triplets(np.random.default_rng(2).normal(size=(10, 3)), seed=2)
        spec = KernelSpec("laplacian", 0.5)
        a1, _ = complexity_terms(t, spec, 2)
        a2, _ = complexity_terms(t, spec, 4)
        assert a2 == pytest.approx(np.sqrt(2) * a1, rel=1e-12)


class TestUnitSphereMax:
    @pytest.mark.parametrize(
        "spec,expected",
        [
            (KernelSpec("gaussian", 3.0), 1.0),
            (KernelSpec("laplacian", 0.2), 1.0),
            (KernelSpec("linear"), 1.0),
            (KernelSpec("relu_ntk", depth=2), 2.0),
            (KernelSpec("relu_ntk", depth=5), 5.0),
        ],
    )
    def test_closed_forms(self, spec, expected):
        assert unit_sphere_kernel_max(spec) == expected


class TestModelNorms:
    def test_simple_contrastive_equals_components(self):
        rng = np.random.default_rng(3)
        t = make_triplets(rng.normal(size=(10, 3)), seed=3)
        model = SimpleContrastive(KernelSpec("gaussian", 1.0), n_components=2).fit(t)
        assert model_norms(model) == pytest.approx(2.0, abs=1e-4)

    def test_spectral_zero_embeddings(self):
        t = make_triplets(np.random.default_rng(4).normal(size=(5, 2)), seed=4)
        model = SpectralContrastive(
            KernelSpec("gaussian", 1.0), n_components=2, max_iters=5, random_state=0
        ).fit(t)
        model.embedding_ = np.zeros_like(model.embedding_)
        model.dual_coef_ = np.zeros_like(model.dual_coef_)
        assert model_norms(model) == 0.0

    def test_spectral_linear_matches_explicit_map(self):
        # built directly in range(K) so the inverse is well defined
        from kernelrep.linalg import PSDSolver

        rng = np.random.default_rng(5)
        t = make_triplets(rng.normal(size=(6, 4)), seed=5)
        model = SpectralContrastive(
            KernelSpec("linear"), n_components=2, max_iters=0, random_state=1,
            jitter_scale=1e-13,
        ).fit(t)
        P = model.points_
        K = P @ P.T
        Z = K @ rng.normal(size=(P.shape[0], 2))
        model.embedding_ = Z
        model.dual_coef_ = PSDSolver(K, 1e-13).solve(Z)
        W = P.T @ model.dual_coef_
        assert model_norms(model) == pytest.approx(float(np.sum(W**2)), rel=1e-6)

    def test_autoencoder_returns_pair(self):
        X = np.random.default_rng(6).normal(size=(15, 3))
        model = KernelAutoencoder(
            KernelSpec("gaussian", 0.8), KernelSpec("gaussian", 1.0),
            n_components=2, alpha=1e-2, max_iters=20, random_state=0,
        ).fit(X)
        enc, dec = model_norms(model)
        assert enc >= 0 and dec >= 0

    def test_kpca_norm_is_component_count(self):
        X = np.random.default_rng(7).normal(size=(10, 3))
        model = KernelPCA(KernelSpec("gaussian", 1.0), n_components=3).fit(X)
        assert model_norms(model) == 3.0


class TestBoundReport:
    def test_fields_finite_nonnegative(self):
        rng = np.random.default_rng(8)
        t = make_triplets(rng.normal(size=(8, 3)), seed=6)
        model = SimpleContrastive(KernelSpec("gaussian", 1.0), n_components=2).fit(t)
        rep = bound_report(model, triplets=t, kernel=model.kernel, h=2, reg=0.0, n=8)
        for value in (rep.alpha, rep.kappa, rep.gamma, rep.r, rep.w_norm_sq_total):
            assert np.isfinite(value) and value >= 0

    def test_autoencoder_r_term(self):
        X = np.random.default_rng(9).normal(size=(12, 3))
        lam = 0.05
        model = KernelAutoencoder(
            KernelSpec("gaussian", 0.8), KernelSpec("gaussian", 1.0),
            n_components=2, alpha=lam, max_iters=10, random_state=0,
        ).fit(X)
        rep = bound_report(model, reg=lam, n=12)
        enc, dec = rep.w_norm_sq
        assert rep.r == pytest.approx(lam * (enc + dec), rel=1e-12)
        assert rep.gamma == 1.0
