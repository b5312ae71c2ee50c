import numpy as np
import pytest

from kernelrep import KernelSpec, SimpleContrastive, TripletSet, assemble_gram_system, make_triplets

LINEAR = KernelSpec("linear")


def explicit_objective_matrix(triplets):
    """Symmetrized d x d loss matrix for the linear kernel: the explicit-feature oracle."""
    C = (triplets.negatives - triplets.positives).T @ triplets.anchors
    return 0.5 * (C + C.T)


def explicit_loss(W, triplets):
    return float(np.trace(W.T @ explicit_objective_matrix(triplets) @ W))


def conditioned_instance(rng, d, n, h, noise=0.3):
    """Random triplets satisfying the closed-form solution's eigencount assumption."""
    for _ in range(100):
        X = rng.normal(size=(n, d))
        t = TripletSet(X, X + noise * rng.normal(size=(n, d)), rng.normal(size=(n, d)))
        lam = np.sort(np.linalg.eigvalsh(explicit_objective_matrix(t)))
        if lam[h - 1] < -1e-8:
            return t, float(lam[:h].sum())
    raise AssertionError("could not draw a conditioned instance")


def degenerate_triplets(rng, n=5, d=3):
    X = rng.normal(size=(n, d))
    same = rng.normal(size=(n, d))
    return TripletSet(X, same, same.copy())  # positives == negatives


class TestAssembly:
    def test_equal_positives_negatives_zero_objective(self):
        t = degenerate_triplets(np.random.default_rng(0))
        K1, K2 = assemble_gram_system(t, KernelSpec("gaussian", 1.0))
        np.testing.assert_allclose(K2, 0.0, atol=1e-12)
        # difference features vanish: lower-right block of K1 is zero too
        np.testing.assert_allclose(K1[5:, 5:], 0.0, atol=1e-12)

    def test_linear_kernel_matches_explicit_features(self):
        rng = np.random.default_rng(1)
        n, d = 2, 2
        t = TripletSet(rng.normal(size=(n, d)), rng.normal(size=(n, d)), rng.normal(size=(n, d)))
        K1, _ = assemble_gram_system(t, LINEAR)
        F = np.hstack([t.anchors.T, (t.negatives - t.positives).T])  # features as columns
        np.testing.assert_allclose(K1, F.T @ F, atol=1e-12)

    def test_objective_matrix_symmetric(self):
        rng = np.random.default_rng(2)
        t = make_triplets(rng.normal(size=(7, 3)), seed=0)
        _, K2 = assemble_gram_system(t, KernelSpec("laplacian", 0.5))
        np.testing.assert_allclose(K2, K2.T, atol=1e-12)

    def test_constraint_matrix_symmetric(self):
        rng = np.random.default_rng(3)
        t = make_triplets(rng.normal(size=(6, 2)), seed=1)
        K1, _ = assemble_gram_system(t, KernelSpec("gaussian", 2.0))
        assert np.max(np.abs(K1 - K1.T)) <= 1e-10


class TestFit:
    def test_degenerate_case_zero_objective_and_orthonormal(self):
        t = degenerate_triplets(np.random.default_rng(4))
        model = SimpleContrastive(KernelSpec("gaussian", 1.0), n_components=2).fit(t)
        assert model.objective_value_ == pytest.approx(0.0, abs=1e-8)
        A = model.coef_
        np.testing.assert_allclose(A.T @ model.constraint_gram_ @ A, np.eye(2), atol=1e-6)

    def test_linear_kernel_matches_oracle(self):
        rng = np.random.default_rng(5)
        for d, n, h in [(3, 10, 2), (2, 6, 1), (3, 8, 2)]:
            t, oracle = conditioned_instance(rng, d, n, h)
            model = SimpleContrastive(LINEAR, n_components=h).fit(t)
            assert model.objective_value_ == pytest.approx(oracle, abs=1e-6)

    def test_beats_random_orthonormal_candidates(self):
        rng = np.random.default_rng(6)
        t, _ = conditioned_instance(rng, 3, 8, 2)
        model = SimpleContrastive(LINEAR, n_components=2).fit(t)
        best_random = min(
            explicit_loss(np.linalg.qr(rng.normal(size=(3, 2)))[0], t) for _ in range(1000)
        )
        assert model.objective_value_ <= best_random + 1e-9

    def test_duplicated_anchors_fit_succeeds(self):
        rng = np.random.default_rng(7)
        X = rng.normal(size=(6, 3))
        X[3] = X[0]  # duplicate anchor makes the Gram singular without jitter
        t = make_triplets(X, aug_sd=0.1, seed=0)
        model = SimpleContrastive(KernelSpec("gaussian", 1.0), n_components=2).fit(t)
        assert np.all(np.isfinite(model.coef_))

    @pytest.mark.parametrize("family,gamma", [("gaussian", 0.8), ("laplacian", 1.2)])
    def test_translation_invariance_stationary_kernels(self, family, gamma):
        rng = np.random.default_rng(8)
        X = rng.normal(size=(6, 3))
        t = make_triplets(X, seed=2)
        shift = rng.normal(size=3)
        t_shifted = TripletSet(t.anchors + shift, t.positives + shift, t.negatives + shift)
        spec = KernelSpec(family, gamma)
        K1a, K2a = assemble_gram_system(t, spec)
        K1b, K2b = assemble_gram_system(t_shifted, spec)
        np.testing.assert_allclose(K1a, K1b, atol=1e-10)
        np.testing.assert_allclose(K2a, K2b, atol=1e-10)
        a = SimpleContrastive(spec, n_components=2).fit(t)
        b = SimpleContrastive(spec, n_components=2).fit(t_shifted)
        assert a.objective_value_ == pytest.approx(b.objective_value_, abs=1e-10)

    def test_objective_equals_independent_eigensolve(self):
        # same quantity through a separately coded whitened eigenproblem
        rng = np.random.default_rng(9)
        t = make_triplets(rng.normal(size=(8, 3)), seed=3)
        spec = KernelSpec("gaussian", 1.0)
        model = SimpleContrastive(spec, n_components=2).fit(t)
        K1, K2 = assemble_gram_system(t, spec)
        lam1, V1 = np.linalg.eigh(K1)
        eps = 1e-10 * np.trace(K1) / K1.shape[0]
        S = (V1 / np.sqrt(np.clip(lam1, 0, None) + eps)) @ V1.T
        lam2 = np.sort(np.linalg.eigvalsh(S @ K2 @ S))[::-1]
        assert model.objective_value_ == pytest.approx(-lam2[:2].sum(), abs=1e-8)

    def test_h_larger_than_n_rejected(self):
        t = degenerate_triplets(np.random.default_rng(10), n=3)
        with pytest.raises(ValueError, match="n_components"):
            SimpleContrastive(LINEAR, n_components=4).fit(t)

    def test_eigenvalues_sorted_descending(self):
        rng = np.random.default_rng(11)
        t = make_triplets(rng.normal(size=(10, 3)), seed=4)
        model = SimpleContrastive(KernelSpec("gaussian", 0.5), n_components=3).fit(t)
        assert np.all(np.diff(model.eigenvalues_) <= 1e-12)


class TestTransform:
    def test_degenerate_difference_block_vanishes(self):
        t = degenerate_triplets(np.random.default_rng(12))
        model = SimpleContrastive(KernelSpec("gaussian", 1.0), n_components=2).fit(t)
        queries = np.random.default_rng(13).normal(size=(4, 3))
        stacked = model._cross_features(queries)
        np.testing.assert_allclose(stacked[:, len(t):], 0.0, atol=1e-12)

    def test_linear_kernel_recovers_explicit_map(self):
        rng = np.random.default_rng(14)
        t, _ = conditioned_instance(rng, 3, 8, 2)
        model = SimpleContrastive(LINEAR, n_components=2).fit(t)
        n = len(t)
        W = t.anchors.T @ model.coef_[:n] + (t.negatives - t.positives).T @ model.coef_[n:]
        queries = rng.normal(size=(5, 3))
        np.testing.assert_allclose(model.transform(queries), queries @ W, atol=1e-8)

    def test_training_anchor_consistent_with_gram_blocks(self):
        rng = np.random.default_rng(15)
        t = make_triplets(rng.normal(size=(6, 2)), seed=5)
        spec = KernelSpec("gaussian", 1.5)
        model = SimpleContrastive(spec, n_components=2).fit(t)
        K1, _ = assemble_gram_system(t, spec)
        n = len(t)
        internal = np.hstack([K1[:n, :n], K1[:n, n:]]) @ model.coef_
        np.testing.assert_allclose(model.transform(t.anchors), internal, atol=1e-8)

    def test_dimension_mismatch(self):
        t = degenerate_triplets(np.random.default_rng(16))
        model = SimpleContrastive(KernelSpec("gaussian", 1.0), n_components=1).fit(t)
        with pytest.raises(ValueError, match="features"):
            model.transform(np.ones((2, 5)))
