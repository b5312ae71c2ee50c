"""Closed-form contrastive kernel embedding.

The triplet alignment loss sum_i f(x_i)^T (f(x_i^-) - f(x_i^+)) under an
orthonormal embedding map reduces to a generalized eigenproblem over the
2n x 2n Gram matrix of anchor features and positive/negative feature
differences. Fitting is a single eigensolve; no iterations.
"""

from typing import NamedTuple

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .exceptions import NotPSDError
from .kernels import gram
from .linalg import DEFAULT_JITTER_SCALE, sym_eig
from .validation import check_matrix

#: eigenvalues of the constraint Gram below RANGE_RTOL * lambda_max are
#: treated as null directions (where the objective provably vanishes too)
RANGE_RTOL = 1e-9


class GramSystem(NamedTuple):
    """Constraint matrix K1 (Gram of [anchors, differences]) and objective matrix K2."""

    constraint: np.ndarray
    objective: np.ndarray


def assemble_gram_system(triplets, kernel):
    """Build the 2n x 2n constraint and objective matrices from triplet Grams.

    With K the anchor Gram, K3 = K_minus - K_plus the anchor-vs-difference
    cross block and KΔ the Gram of the difference features, the constraint
    matrix is [[K, K3], [K3^T, KΔ]] and the objective matrix is the negative
    symmetric part of [K3; KΔ] @ [K, K3].
    """
    X, P, N = triplets.anchors, triplets.positives, triplets.negatives
    K = gram(kernel, X)
    K_minus = gram(kernel, X, N)
    K_plus = gram(kernel, X, P)
    K_mm = gram(kernel, N)
    K_pp = gram(kernel, P)
    K_mp = gram(kernel, N, P)

    K3 = K_minus - K_plus
    K_delta = K_mm + K_pp - K_mp - K_mp.T
    K1 = np.block([[K, K3], [K3.T, K_delta]])
    K1 = 0.5 * (K1 + K1.T)

    B = np.vstack([K3, K_delta]) @ np.hstack([K, K3])
    K2 = -0.5 * (B + B.T)
    return GramSystem(K1, K2)


class SimpleContrastive(BaseEstimator, TransformerMixin):
    """Contrastive embedding with a closed-form fit.

    Parameters
    ----------
    kernel : KernelSpec
    n_components : int
        Embedding dimension h.
    jitter_scale : float
        Trace-relative jitter used when inverting the constraint Gram.

    Attributes (after fit)
    ----------------------
    coef_ : (2n, h) coefficient matrix A realizing the embedding map
    eigenvalues_ : the h leading eigenvalues of the whitened objective, descending
    objective_value_ : achieved training loss (= -sum(eigenvalues_))
    degenerate_ : True when fewer than h non-negative eigenvalues were available
    triplets_ : retained training triplets
    """

    def __init__(self, kernel, n_components=2, jitter_scale=DEFAULT_JITTER_SCALE):
        self.kernel = kernel
        self.n_components = n_components
        self.jitter_scale = jitter_scale

    def fit(self, triplets, y=None):
        n = len(triplets)
        h = self.n_components
        if not 1 <= h <= n:
            raise ValueError(f"n_components must be in [1, {n}], got {h}")

        K1, K2 = assemble_gram_system(triplets, self.kernel)
        lam1, V1 = sym_eig(K1)
        scale = max(float(lam1.max()), 0.0)
        if lam1.min() < -1e-6 * scale:
            raise NotPSDError(
                f"constraint Gram has eigenvalue {lam1.min():.3e}; not positive semidefinite"
            )

        # whiten on the numerical range of K1: its null space is also null
        # for K2, and inverting it would only amplify rounding noise (and
        # break the orthonormality A^T K1 A = I when selected)
        keep = lam1 > RANGE_RTOL * scale
        rank_deficient = int(keep.sum()) < h
        if rank_deficient:
            # fewer usable directions than components: fall back to the
            # jittered whitening and flag the model
            eps = self.jitter_scale * float(np.trace(K1)) / K1.shape[0]
            whiten = V1 / np.sqrt(np.clip(lam1, 0.0, None) + eps)[None, :]
        else:
            whiten = V1[:, keep] / np.sqrt(lam1[keep])[None, :]

        M = whiten.T @ K2 @ whiten
        lam2, V2 = sym_eig(0.5 * (M + M.T))

        self.eigenvalues_ = lam2[:h]
        self.coef_ = whiten @ V2[:, :h]
        self.objective_value_ = -float(self.eigenvalues_.sum())
        tol = 1e-10 * max(np.abs(lam2).max(), 1.0)
        self.degenerate_ = rank_deficient or bool(np.any(self.eigenvalues_ < -tol))
        self.triplets_ = triplets
        self.constraint_gram_ = K1
        return self

    def _cross_features(self, X):
        t = self.triplets_
        k_anchor = gram(self.kernel, X, t.anchors)
        k_diff = gram(self.kernel, X, t.negatives) - gram(self.kernel, X, t.positives)
        return np.hstack([k_anchor, k_diff])

    def transform(self, X):
        """Embed rows of X, shape (m, n_components)."""
        if not hasattr(self, "coef_"):
            raise NotFittedError("SimpleContrastive instance is not fitted yet")
        X = check_matrix(X, "X")
        if X.shape[1] != self.triplets_.n_features:
            raise ValueError(
                f"X has {X.shape[1]} features, expected {self.triplets_.n_features}"
            )
        return self._cross_features(X) @ self.coef_
