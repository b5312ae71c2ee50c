"""Dense symmetric linear algebra shared by every model.

Thin, contract-checked wrappers around scipy: descending-ordered symmetric
eigendecomposition with a fixed sign convention, jittered PSD inverse square
root, and ridge solves against a (possibly cached) Cholesky factorization.
"""

from typing import NamedTuple

import numpy as np
import scipy.linalg

from .exceptions import NotPSDError, SingularMatrixError
from .validation import check_square

DEFAULT_JITTER_SCALE = 1e-10


class SymEig(NamedTuple):
    """Eigenvalues sorted descending and column-aligned orthonormal eigenvectors."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def _fix_signs(V):
    # first component with non-negligible magnitude is made positive, so
    # repeated runs produce identical eigenvectors
    W = V.copy()
    for j in range(W.shape[1]):
        col = W[:, j]
        nz = np.flatnonzero(np.abs(col) > 1e-12 * max(np.abs(col).max(), 1e-300))
        if nz.size and col[nz[0]] < 0:
            W[:, j] = -col
    return W


def sym_eig(M):
    """Eigendecomposition of a symmetric matrix, eigenvalues descending.

    The input is symmetrized as (M + M^T)/2 before factorization. Eigenvector
    signs follow the first-nonzero-positive convention.
    """
    M = check_square(M, "M")
    S = 0.5 * (M + M.T)
    lam, V = scipy.linalg.eigh(S)
    order = np.argsort(lam, kind="stable")[::-1]
    return SymEig(lam[order], _fix_signs(V[:, order]))


def inv_sqrt_psd(M, jitter_scale=DEFAULT_JITTER_SCALE):
    """(M + eps*I)^{-1/2} for PSD M, with eps = jitter_scale * trace(M) / m.

    Eigenvalues slightly below zero (rounding noise) are clipped to zero
    before jittering; eigenvalues below -1e-6 * ||M|| raise NotPSDError.
    """
    M = check_square(M, "M")
    m = M.shape[0]
    lam, V = sym_eig(M)
    scale = max(np.abs(lam).max(), 0.0) if m else 0.0
    if m and lam.min() < -1e-6 * scale:
        raise NotPSDError(
            f"matrix has eigenvalue {lam.min():.3e} < -1e-6 * ||M||; not positive semidefinite"
        )
    eps = jitter_scale * float(np.trace(M)) / m if m else 0.0
    lam_j = np.clip(lam, 0.0, None) + eps
    inv_root = np.where(lam_j > 0, 1.0 / np.sqrt(np.where(lam_j > 0, lam_j, 1.0)), 0.0)
    S = (V * inv_root) @ V.T
    return 0.5 * (S + S.T)


class PSDSolver:
    """Cached Cholesky factorization of K + eps*I with trace-relative jitter eps.

    Built once per model fit and reused for every gradient and inference
    solve against the same kernel matrix.
    """

    def __init__(self, K, jitter_scale=DEFAULT_JITTER_SCALE):
        K = check_square(K, "K")
        m = K.shape[0]
        self.jitter = jitter_scale * float(np.trace(K)) / m if m else 0.0
        A = K + self.jitter * np.eye(m)
        try:
            self._factor = scipy.linalg.cho_factor(A, lower=True, check_finite=False)
        except scipy.linalg.LinAlgError as exc:
            raise SingularMatrixError(
                "kernel matrix is numerically singular even after jitter; "
                "increase jitter_scale or the ridge parameter"
            ) from exc

    def solve(self, B):
        """(K + eps*I)^{-1} B."""
        B = np.asarray(B, dtype=np.float64)
        return scipy.linalg.cho_solve(self._factor, B, check_finite=False)


def ridge_solve(K, lam, B):
    """(K + lam*I)^{-1} B for symmetric PSD K and lam >= 0.

    Raises SingularMatrixError when the shifted system cannot be factorized
    (e.g. lam = 0 with singular K); the fix is a larger lam or jitter.
    """
    K = check_square(K, "K")
    if lam < 0:
        raise ValueError(f"lam must be >= 0, got {lam}")
    B = np.asarray(B, dtype=np.float64)
    if B.shape[0] != K.shape[0]:
        raise ValueError(f"B has {B.shape[0]} rows, expected {K.shape[0]}")
    A = K + lam * np.eye(K.shape[0])
    try:
        factor = scipy.linalg.cho_factor(A, lower=True, check_finite=False)
    except scipy.linalg.LinAlgError as exc:
        raise SingularMatrixError(
            "ridge system is singular (lam too small for a rank-deficient kernel matrix); "
            "increase lam or the jitter"
        ) from exc
    return scipy.linalg.cho_solve(factor, B, check_finite=False)
