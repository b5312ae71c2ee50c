"""Spectral contrastive kernel embedding trained by gradient descent.

The loss over per-point embeddings Z (rows aligned with the stacked triplet
points: anchors, then positives, then negatives) is

    sum_i  -2 z_i . z_{i+n} + (z_i . z_{i+2n})^2  +  alpha * Tr(Z^T K^{-1} Z)

where K is the kernel matrix of all 3n training points. The trace term is
the squared RKHS norm of the embedding map realized by Z, so inference on a
new point is the kernel-ridge map  gram(x*, points) @ K^{-1} Z.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .exceptions import OptimizationError
from .kernels import gram
from .linalg import DEFAULT_JITTER_SCALE, PSDSolver
from .validation import check_matrix


def _pair_terms(Z, n):
    anchors, positives, negatives = Z[:n], Z[n : 2 * n], Z[2 * n :]
    pos_dots = np.einsum("ij,ij->i", anchors, positives)
    neg_dots = np.einsum("ij,ij->i", anchors, negatives)
    return anchors, positives, negatives, pos_dots, neg_dots


def spectral_loss(Z, K, alpha):
    """Evaluate the spectral contrastive loss for embeddings Z (3n, h)."""
    Z = check_matrix(Z, "Z")
    n = _triplet_count(Z, K)
    solver = PSDSolver(K, jitter_scale=0.0)
    return _loss_given(Z, n, solver.solve(Z), alpha)


def spectral_grad(Z, K, alpha):
    """Gradient of spectral_loss with respect to Z, same shape as Z."""
    Z = check_matrix(Z, "Z")
    n = _triplet_count(Z, K)
    solver = PSDSolver(K, jitter_scale=0.0)
    return _grad_given(Z, n, solver.solve(Z), alpha)


def _triplet_count(Z, K):
    if Z.shape[0] % 3 != 0:
        raise ValueError(f"Z must have 3n rows, got {Z.shape[0]}")
    K = np.asarray(K)
    if K.shape != (Z.shape[0], Z.shape[0]):
        raise ValueError(f"K must be {Z.shape[0]} x {Z.shape[0]}, got {K.shape}")
    return Z.shape[0] // 3


def _loss_given(Z, n, Kinv_Z, alpha):
    _, _, _, pos_dots, neg_dots = _pair_terms(Z, n)
    contrast = -2.0 * pos_dots.sum() + np.sum(neg_dots**2)
    return float(contrast + alpha * np.sum(Z * Kinv_Z))


def _grad_given(Z, n, Kinv_Z, alpha):
    anchors, positives, negatives, _, neg_dots = _pair_terms(Z, n)
    G = 2.0 * alpha * Kinv_Z
    G[:n] += -2.0 * positives + 2.0 * neg_dots[:, None] * negatives
    G[n : 2 * n] += -2.0 * anchors
    G[2 * n :] += 2.0 * neg_dots[:, None] * anchors
    return G


class SpectralContrastive(BaseEstimator, TransformerMixin):
    """Spectral contrastive embedding fitted by (optionally backtracking) gradient descent.

    Parameters
    ----------
    kernel : KernelSpec
    n_components : int
        Embedding dimension h.
    alpha : float
        RKHS-norm regularizer (must be > 0).
    step : float
        Initial gradient step size.
    max_iters, tol : int, float
        Stop when the gradient norm falls below tol * (1 + ||Z||_F) or after
        max_iters steps.
    backtracking : bool
        Halve the step until the Armijo condition holds (keeps the recorded
        loss sequence non-increasing).
    random_state : int
        Seed for the small Gaussian initialization of Z.

    Attributes (after fit)
    ----------------------
    embedding_ : (3n, h) learned embeddings of the stacked triplet points
    dual_coef_ : (3n, h) K^{-1} embedding_, applied at inference
    loss_ : final training loss;  n_iter_ : accepted steps taken
    """

    def __init__(
        self,
        kernel,
        n_components=2,
        alpha=1e-3,
        step=1e-2,
        max_iters=2000,
        tol=1e-6,
        backtracking=True,
        jitter_scale=DEFAULT_JITTER_SCALE,
        random_state=0,
    ):
        self.kernel = kernel
        self.n_components = n_components
        self.alpha = alpha
        self.step = step
        self.max_iters = max_iters
        self.tol = tol
        self.backtracking = backtracking
        self.jitter_scale = jitter_scale
        self.random_state = random_state

    def fit(self, triplets, y=None):
        if not self.alpha > 0:
            raise ValueError(f"alpha must be > 0, got {self.alpha}")
        if not self.step > 0:
            raise ValueError(f"step must be > 0, got {self.step}")
        n = len(triplets)
        points = triplets.stacked()
        K = gram(self.kernel, points)
        solver = PSDSolver(K, self.jitter_scale)

        rng = np.random.default_rng(self.random_state)
        Z = rng.normal(0.0, 0.1, size=(3 * n, self.n_components))

        Kinv_Z = solver.solve(Z)
        loss = _loss_given(Z, n, Kinv_Z, self.alpha)
        history = [loss]
        n_iter = 0
        rises = 0
        for _ in range(self.max_iters):
            G = _grad_given(Z, n, Kinv_Z, self.alpha)
            gnorm = np.linalg.norm(G)
            if gnorm <= self.tol * (1.0 + np.linalg.norm(Z)):
                break
            if self.backtracking:
                step, accepted = self.step, False
                for _ in range(60):
                    Z_new = Z - step * G
                    Kinv_new = solver.solve(Z_new)
                    loss_new = _loss_given(Z_new, n, Kinv_new, self.alpha)
                    if loss_new <= loss - 1e-4 * step * gnorm**2:
                        accepted = True
                        break
                    step *= 0.5
                if not accepted:
                    break  # no descent direction left at float precision
            else:
                Z_new = Z - self.step * G
                Kinv_new = solver.solve(Z_new)
                loss_new = _loss_given(Z_new, n, Kinv_new, self.alpha)
                rises = rises + 1 if (loss_new > loss or not np.isfinite(loss_new)) else 0
                if rises >= 10:
                    raise OptimizationError(
                        "loss increased for 10 consecutive steps; use a smaller step"
                    )
            Z, Kinv_Z, loss = Z_new, Kinv_new, loss_new
            history.append(loss)
            n_iter += 1

        self.points_ = points
        self.embedding_ = Z
        self.dual_coef_ = solver.solve(Z)
        self._solver = solver
        self.loss_ = loss
        self.loss_history_ = np.asarray(history)
        self.n_iter_ = n_iter
        return self

    def transform(self, X):
        """Embed rows of X through the kernel-ridge inference map, shape (m, n_components)."""
        if not hasattr(self, "dual_coef_"):
            raise NotFittedError("SpectralContrastive instance is not fitted yet")
        X = check_matrix(X, "X")
        if X.shape[1] != self.points_.shape[1]:
            raise ValueError(f"X has {X.shape[1]} features, expected {self.points_.shape[1]}")
        return gram(self.kernel, X, self.points_) @ self.dual_coef_
