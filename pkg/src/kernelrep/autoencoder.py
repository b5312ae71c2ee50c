"""Kernel autoencoder: ridge reconstruction through a unit-norm bottleneck.

For bottleneck points Z (rows, one per training sample) the decoder is the
kernel ridge fit from Z back to the inputs, with training reconstruction
Q = (K_Z + alpha*I)^{-1} K_Z X. The objective adds the squared RKHS norms of
encoder and decoder maps; the unit-norm constraint on bottleneck rows is kept
by projection after each gradient step. The de-noising variant encodes a
corrupted copy of the data while reconstructing the clean targets.
"""

import numpy as np
import scipy.linalg
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .exceptions import OptimizationError, SingularMatrixError
from .kernels import gram
from .linalg import DEFAULT_JITTER_SCALE, PSDSolver
from .datasets import corrupt
from .kpca import KernelPCA
from .validation import check_matrix


def _ridge_factor(K_Z, alpha):
    M = K_Z + alpha * np.eye(K_Z.shape[0])
    try:
        return scipy.linalg.cho_factor(M, lower=True, check_finite=False)
    except scipy.linalg.LinAlgError as exc:
        raise SingularMatrixError(
            "bottleneck ridge system is singular; increase alpha"
        ) from exc


def ridge_reconstruction(Z, X, dec_kernel, alpha):
    """Training reconstruction Q of X through bottleneck rows Z, shape like X."""
    Z = check_matrix(Z, "Z")
    X = check_matrix(X, "X")
    if Z.shape[0] != X.shape[0]:
        raise ValueError(f"Z has {Z.shape[0]} rows, X has {X.shape[0]}")
    if not alpha > 0:
        raise ValueError(f"alpha must be > 0, got {alpha}")
    K_Z = gram(dec_kernel, Z)
    factor = _ridge_factor(K_Z, alpha)
    return K_Z @ scipy.linalg.cho_solve(factor, X, check_finite=False)


def autoencoder_objective(Z, X, enc_solver, dec_kernel, alpha):
    """Reconstruction error plus alpha times the encoder and decoder norm traces.

    The decoder trace is evaluated in the ridge-substituted form
    Tr(X^T M^{-1} K_Z M^{-1} X) with M = K_Z + alpha*I, which equals the
    trace through K_Z^{-1} without inverting a possibly singular K_Z.
    """
    K_Z = gram(dec_kernel, Z)
    factor = _ridge_factor(K_Z, alpha)
    T = scipy.linalg.cho_solve(factor, X, check_finite=False)  # M^{-1} X
    Q = K_Z @ T
    recon = float(np.sum((Q - X) ** 2))
    enc_trace = float(np.sum(Z * enc_solver.solve(Z)))
    dec_trace = float(np.sum(T * (K_Z @ T)))
    return recon + alpha * (enc_trace + dec_trace)


def _decoder_kernel_gradient(Z, K_Z, G_K, dec_kernel):
    """Chain rule of sum_ij G_K[i,j] * k(z_i, z_j) through the kernel entries.

    G_K must be symmetric. Returns the (n, h) gradient with respect to Z.
    """
    W = 2.0 * G_K
    if dec_kernel.family == "gaussian":
        C = W * K_Z * (-2.0 * dec_kernel.gamma)
        return C.sum(axis=1)[:, None] * Z - C @ Z
    if dec_kernel.family == "linear":
        return W @ Z
    if dec_kernel.family == "laplacian":
        # subgradient: sign of the coordinate difference, 0 at ties
        diff_sign = np.sign(Z[:, None, :] - Z[None, :, :])
        C = W * K_Z * (-dec_kernel.gamma)
        return np.einsum("ij,ijt->it", C, diff_sign)
    raise ValueError(
        f"unsupported decoder kernel family {dec_kernel.family!r}; "
        "analytic gradients exist for gaussian, linear and laplacian"
    )


def autoencoder_gradient(Z, X, enc_solver, dec_kernel, alpha):
    """Exact gradient of autoencoder_objective with respect to Z, shape like Z."""
    K_Z = gram(dec_kernel, Z)
    factor = _ridge_factor(K_Z, alpha)
    T = scipy.linalg.cho_solve(factor, X, check_finite=False)
    # objective as a function of K_Z collapses to alpha*Tr(X^T M^{-1} X), so
    # dL/dK_Z = -alpha * M^{-1} X X^T M^{-1}
    G_K = -alpha * (T @ T.T)
    grad = _decoder_kernel_gradient(Z, K_Z, G_K, dec_kernel)
    grad += 2.0 * alpha * enc_solver.solve(Z)
    return grad


def _unit_rows(Z):
    norms = np.linalg.norm(Z, axis=1)
    norms[norms == 0] = 1.0
    return Z / norms[:, None]


class KernelAutoencoder(BaseEstimator, TransformerMixin):
    """Kernel AE with unit-norm bottleneck rows, fitted by projected gradient descent.

    Parameters
    ----------
    enc_kernel, dec_kernel : KernelSpec
        Input-space kernel and bottleneck-space kernel. The decoder kernel
        must be gaussian, linear or laplacian (analytic gradient).
    n_components : int
        Bottleneck dimension h.
    alpha : float
        Ridge/norm regularizer (> 0).
    denoising : bool
        Encode a noise-corrupted copy of the inputs while reconstructing the
        clean ones. The corrupted copy can be passed to fit or generated
        internally with `noise_sd`.
    step, max_iters, tol, backtracking : gradient descent controls.

    Attributes (after fit)
    ----------------------
    embedding_ : (n, h) unit-norm bottleneck rows (best objective iterate)
    reconstruction_ : (n, d) training reconstruction Q
    objective_ : best objective value;  objective_history_ : recorded sequence
    X_fit_ : clean targets;  X_enc_ : encoder inputs (== X_fit_ unless denoising)
    """

    def __init__(
        self,
        enc_kernel,
        dec_kernel,
        n_components=2,
        alpha=1e-3,
        denoising=False,
        noise_sd=0.1,
        step=1e-2,
        max_iters=1000,
        tol=1e-6,
        backtracking=True,
        jitter_scale=DEFAULT_JITTER_SCALE,
        random_state=0,
    ):
        self.enc_kernel = enc_kernel
        self.dec_kernel = dec_kernel
        self.n_components = n_components
        self.alpha = alpha
        self.denoising = denoising
        self.noise_sd = noise_sd
        self.step = step
        self.max_iters = max_iters
        self.tol = tol
        self.backtracking = backtracking
        self.jitter_scale = jitter_scale
        self.random_state = random_state

    def _init_bottleneck(self, X_enc, rng):
        # deterministic, informative start: unit-normalized KPCA scores
        try:
            kpca = KernelPCA(self.enc_kernel, self.n_components).fit(X_enc)
            Z = kpca.scores_
            if np.all(np.linalg.norm(Z, axis=1) > 0):
                return _unit_rows(Z)
        except Exception:
            pass
        return _unit_rows(rng.normal(size=(X_enc.shape[0], self.n_components)))

    def fit(self, X, y=None, X_noisy=None):
        if not self.alpha > 0:
            raise ValueError(f"alpha must be > 0, got {self.alpha}")
        if self.dec_kernel.family not in ("gaussian", "linear", "laplacian"):
            raise ValueError(
                f"decoder kernel family {self.dec_kernel.family!r} is unsupported"
            )
        X = check_matrix(X, "X")
        n = X.shape[0]
        if not 1 <= self.n_components:
            raise ValueError(f"n_components must be >= 1, got {self.n_components}")

        if self.denoising:
            if X_noisy is not None:
                X_enc = check_matrix(X_noisy, "X_noisy")
                if X_enc.shape != X.shape:
                    raise ValueError("X_noisy must have the same shape as X")
            else:
                X_enc = corrupt(X, self.noise_sd, seed=self.random_state)
        else:
            X_enc = X

        K_enc = gram(self.enc_kernel, X_enc)
        enc_solver = PSDSolver(K_enc, self.jitter_scale)
        rng = np.random.default_rng(self.random_state)
        Z = self._init_bottleneck(X_enc, rng)

        obj = autoencoder_objective(Z, X, enc_solver, self.dec_kernel, self.alpha)
        best_Z, best_obj = Z, obj
        history = [obj]
        n_iter = 0
        rises = 0
        for _ in range(self.max_iters):
            G = autoencoder_gradient(Z, X, enc_solver, self.dec_kernel, self.alpha)
            gnorm = np.linalg.norm(G)
            if gnorm <= self.tol * (1.0 + np.linalg.norm(Z)):
                break
            if self.backtracking:
                step, accepted = self.step, False
                for _ in range(50):
                    Z_new = _unit_rows(Z - step * G)
                    obj_new = autoencoder_objective(
                        Z_new, X, enc_solver, self.dec_kernel, self.alpha
                    )
                    if obj_new < obj:
                        accepted = True
                        break
                    step *= 0.5
                if not accepted:
                    break
            else:
                Z_new = _unit_rows(Z - self.step * G)
                obj_new = autoencoder_objective(
                    Z_new, X, enc_solver, self.dec_kernel, self.alpha
                )
                # projection keeps iterates bounded, so divergence shows up as
                # failure to improve on the best value rather than blow-up
                rises = rises + 1 if (obj_new > best_obj or not np.isfinite(obj_new)) else 0
                if rises >= 10:
                    raise OptimizationError(
                        "objective increased for 10 consecutive steps; use a smaller step"
                    )
            Z, obj = Z_new, obj_new
            history.append(obj)
            n_iter += 1
            if obj < best_obj:
                best_Z, best_obj = Z, obj

        K_Z = gram(self.dec_kernel, best_Z)
        factor = _ridge_factor(K_Z, self.alpha)
        self.X_fit_ = X.copy()
        self.X_enc_ = X_enc if X_enc is not X else X.copy()
        self.embedding_ = best_Z
        self.dual_coef_ = enc_solver.solve(best_Z)  # K_enc^{-1} Z: inference map
        self.decoder_coef_ = scipy.linalg.cho_solve(factor, X, check_finite=False)
        self.reconstruction_ = K_Z @ self.decoder_coef_
        self.objective_ = best_obj
        self.objective_history_ = np.asarray(history)
        self.n_iter_ = n_iter
        self._enc_solver = enc_solver
        return self

    def transform(self, X):
        """Bottleneck embedding of rows of X, shape (m, n_components); not renormalized."""
        if not hasattr(self, "embedding_"):
            raise NotFittedError("KernelAutoencoder instance is not fitted yet")
        X = check_matrix(X, "X")
        if X.shape[1] != self.X_enc_.shape[1]:
            raise ValueError(f"X has {X.shape[1]} features, expected {self.X_enc_.shape[1]}")
        return gram(self.enc_kernel, X, self.X_enc_) @ self.dual_coef_

    def inverse_transform(self, Z):
        """Decode bottleneck rows back to input space, shape (m, d)."""
        if not hasattr(self, "embedding_"):
            raise NotFittedError("KernelAutoencoder instance is not fitted yet")
        Z = check_matrix(Z, "Z")
        return gram(self.dec_kernel, Z, self.embedding_) @ self.decoder_coef_

    def reconstruct(self, X):
        """Embed then decode rows of X (the de-noised output in denoising mode)."""
        return self.inverse_transform(self.transform(X))
