"""Kernel PCA baseline: centered-Gram eigendecomposition with out-of-sample projection."""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .exceptions import RankError
from .kernels import gram
from .linalg import sym_eig
from .validation import check_matrix

RANK_RTOL = 1e-12


class KernelPCA(BaseEstimator, TransformerMixin):
    """PCA in the RKHS of `kernel`, with unit-RKHS-norm principal directions.

    Fitting eigendecomposes the doubly centered Gram matrix and keeps the top
    `n_components` directions scaled to alphas^T K_c alphas = I. Out-of-sample
    points are projected through the stored centering statistics.

    Attributes (after fit)
    ----------------------
    alphas_ : (n, h) projection coefficients
    eigenvalues_ : top h eigenvalues of the centered Gram, descending
    X_fit_ : retained training samples
    """

    def __init__(self, kernel, n_components=2):
        self.kernel = kernel
        self.n_components = n_components

    def fit(self, X, y=None):
        X = check_matrix(X, "X")
        n = X.shape[0]
        h = self.n_components
        if not 1 <= h <= n:
            raise ValueError(f"n_components must be in [1, {n}], got {h}")

        K = gram(self.kernel, X)
        col_means = K.mean(axis=0)
        total_mean = float(K.mean())
        Kc = K - col_means[None, :] - col_means[:, None] + total_mean
        Kc = 0.5 * (Kc + Kc.T)

        lam, V = sym_eig(Kc)
        cutoff = RANK_RTOL * max(float(np.trace(Kc)), 0.0)
        rank = int(np.sum(lam > cutoff))
        if h > rank:
            raise RankError(
                f"requested {h} components but the centered Gram has numerical rank {rank}"
            )
        self.eigenvalues_ = lam[:h]
        self.alphas_ = V[:, :h] / np.sqrt(lam[:h])[None, :]
        self.X_fit_ = X.copy()
        self._col_means = col_means
        self._total_mean = total_mean
        self.scores_ = Kc @ self.alphas_
        return self

    def transform(self, X):
        """Project rows of X onto the principal directions, shape (m, n_components)."""
        if not hasattr(self, "alphas_"):
            raise NotFittedError("KernelPCA instance is not fitted yet")
        X = check_matrix(X, "X")
        K_cross = gram(self.kernel, X, self.X_fit_)
        K_cross_c = (
            K_cross
            - K_cross.mean(axis=1)[:, None]
            - self._col_means[None, :]
            + self._total_mean
        )
        return K_cross_c @ self.alphas_
