"""Computable complexity quantities reported alongside results.

Only the observable terms of the generalisation bounds are computed (trace
sums, diagonal maxima, unit-sphere kernel maxima, fitted RKHS norms); the
probabilistic bound statements themselves are not runnable and are not
asserted anywhere.
"""

from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np

from .autoencoder import KernelAutoencoder
from .kernels import kernel_diagonal, _ntk_recursion
from .kpca import KernelPCA
from .simple import SimpleContrastive
from .spectral import SpectralContrastive


@dataclass
class BoundReport:
    """One model's complexity terms; `w_norm_sq` is a pair for autoencoders."""

    alpha: float
    kappa: float
    gamma: float
    r: float
    w_norm_sq: Union[float, Tuple[float, float]]
    n: int

    @property
    def w_norm_sq_total(self):
        if isinstance(self.w_norm_sq, tuple):
            return float(sum(self.w_norm_sq))
        return float(self.w_norm_sq)


def complexity_terms(triplets, kernel, h):
    """(alpha, kappa): the trace-sum complexity term and the largest kernel diagonal."""
    diag_a = kernel_diagonal(kernel, triplets.anchors)
    diag_p = kernel_diagonal(kernel, triplets.positives)
    diag_n = kernel_diagonal(kernel, triplets.negatives)
    alpha = float(
        np.sqrt(h * diag_a.sum()) + np.sqrt(h * diag_n.sum()) + np.sqrt(h * diag_p.sum())
    )
    kappa = float(max(diag_a.max(), diag_p.max(), diag_n.max()))
    return alpha, kappa


def unit_sphere_kernel_max(kernel):
    """Largest diagonal kernel value over unit-norm inputs, in closed form."""
    if kernel.family in ("gaussian", "laplacian", "linear"):
        return 1.0
    if kernel.family == "relu_ntk":
        return float(_ntk_recursion(np.array([1.0]), kernel.depth)[0])
    raise ValueError(kernel.family)


def model_norms(model):
    """Squared RKHS norm(s) of a fitted model's embedding map.

    SimpleContrastive: Tr(A^T K1 A) (h at a non-degenerate optimum).
    SpectralContrastive: Tr(Z^T K^{-1} Z through the fitted factorization).
    KernelAutoencoder: the (encoder, decoder) pair of norm traces.
    KernelPCA: h by construction of the unit-norm directions.
    """
    if isinstance(model, SimpleContrastive):
        A = model.coef_
        return float(np.trace(A.T @ model.constraint_gram_ @ A))
    if isinstance(model, SpectralContrastive):
        return float(np.sum(model.embedding_ * model.dual_coef_))
    if isinstance(model, KernelAutoencoder):
        enc = float(np.sum(model.embedding_ * model.dual_coef_))
        T = model.decoder_coef_
        from .kernels import gram

        K_Z = gram(model.dec_kernel, model.embedding_)
        dec = float(np.sum(T * (K_Z @ T)))
        return enc, dec
    if isinstance(model, KernelPCA):
        return float(model.n_components)
    raise TypeError(f"unsupported model type {type(model).__name__}")


def bound_report(model, triplets=None, kernel=None, h=None, reg=0.0, n=0):
    """Assemble a BoundReport for one fitted model.

    alpha/kappa need the triplets the model saw (0 when unavailable, e.g.
    KPCA trained on plain features); r = reg * total squared norm.
    """
    if triplets is not None and kernel is not None and h is not None:
        a, k = complexity_terms(triplets, kernel, h)
    else:
        a, k = 0.0, 0.0
    if isinstance(model, KernelAutoencoder):
        g = unit_sphere_kernel_max(model.dec_kernel)
    else:
        g = unit_sphere_kernel_max(kernel if kernel is not None else model.kernel)
    w = model_norms(model)
    total = float(sum(w)) if isinstance(w, tuple) else float(w)
    return BoundReport(alpha=a, kappa=k, gamma=g, r=float(reg) * total, w_norm_sq=w, n=n)
