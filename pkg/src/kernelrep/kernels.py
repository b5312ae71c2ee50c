"""Scalar kernels and Gram-matrix assembly.

Four families are supported: gaussian ``exp(-gamma * ||x - y||^2)``,
laplacian ``exp(-gamma * ||x - y||_1)``, linear ``x . y`` and an L-layer
ReLU NTK evaluated through the arc-cosine recursion on unit-normalized
inputs. All matrix inputs use rows as samples.
"""

from dataclasses import dataclass, replace

import numpy as np
from scipy.spatial.distance import cdist

from .validation import check_matrix, check_vector, check_same_features

KERNEL_FAMILIES = ("gaussian", "laplacian", "linear", "relu_ntk")

#: families whose bandwidth gamma is an active hyperparameter
BANDWIDTH_FAMILIES = ("gaussian", "laplacian")


@dataclass(frozen=True)
class KernelSpec:
    """Kernel family plus its parameters; the single switch threaded through every model.

    Parameters
    ----------
    family : str
        One of "gaussian", "laplacian", "linear", "relu_ntk".
    gamma : float
        Bandwidth, used by the gaussian and laplacian families only.
    depth : int
        Number of layers of the ReLU NTK recursion (relu_ntk only).
    """

    family: str
    gamma: float = 1.0
    depth: int = 1

    def __post_init__(self):
        if self.family not in KERNEL_FAMILIES:
            raise ValueError(
                f"unknown kernel family {self.family!r}; expected one of {KERNEL_FAMILIES}"
            )
        if self.family in BANDWIDTH_FAMILIES and not self.gamma > 0:
            raise ValueError(f"gamma must be > 0 for {self.family} kernels, got {self.gamma}")
        if self.family == "relu_ntk":
            if int(self.depth) != self.depth or self.depth < 1:
                raise ValueError(f"depth must be an integer >= 1 for relu_ntk, got {self.depth}")

    @property
    def needs_bandwidth(self):
        return self.family in BANDWIDTH_FAMILIES

    def with_gamma(self, gamma):
        """Copy of this spec with a different bandwidth."""
        return replace(self, gamma=float(gamma))

    def label(self):
        """Short human-readable tag used in result tables."""
        if self.family == "relu_ntk":
            return f"relu_ntk({self.depth})"
        return self.family


def _ntk_recursion(u, depth):
    """Arc-cosine NTK recursion on cosines u in [-1, 1].

    Depth 1 reduces to the identity; each extra layer composes the degree-1
    arc-cosine map and accumulates the derivative factor.
    """
    u = np.clip(u, -1.0, 1.0)
    kappa = u
    ntk = np.array(u, dtype=np.float64, copy=True)
    for _ in range(int(depth) - 1):
        theta = np.arccos(np.clip(kappa, -1.0, 1.0))
        kappa0 = (np.pi - theta) / np.pi
        kappa_next = (kappa * (np.pi - theta) + np.sqrt(np.clip(1.0 - kappa * kappa, 0.0, None))) / np.pi
        ntk = ntk * kappa0 + kappa_next
        kappa = kappa_next
    return ntk


def _unit_rows(X, name):
    norms = np.linalg.norm(X, axis=1)
    if np.any(norms == 0):
        raise ValueError(f"relu_ntk kernel is undefined on zero vectors (found one in {name})")
    return X / norms[:, None]


def kernel_value(spec, x, y):
    """Evaluate the scalar kernel k(x, y) for a single pair of vectors."""
    x = check_vector(x, "x")
    y = check_vector(y, "y")
    if x.shape[0] != y.shape[0]:
        raise ValueError(f"x and y disagree on dimension: {x.shape[0]} vs {y.shape[0]}")
    return float(gram(spec, x[None, :], y[None, :])[0, 0])


def gram(spec, X, Y=None):
    """Gram matrix K[i, j] = k(X[i], Y[j]).

    When ``Y`` is omitted the matrix is computed against ``X`` itself and is
    symmetrized exactly, with the per-family diagonal written explicitly.
    """
    X = check_matrix(X, "X")
    symmetric = Y is None or Y is X
    Y = X if symmetric else check_matrix(Y, "Y")
    check_same_features(X, Y)

    if spec.family == "linear":
        K = X @ Y.T
    elif spec.family == "gaussian":
        sq = cdist(X, Y, metric="sqeuclidean")
        K = np.exp(-spec.gamma * np.clip(sq, 0.0, None))
    elif spec.family == "laplacian":
        K = np.exp(-spec.gamma * cdist(X, Y, metric="cityblock"))
    elif spec.family == "relu_ntk":
        Xn = _unit_rows(X, "X")
        Yn = Xn if symmetric else _unit_rows(Y, "Y")
        K = _ntk_recursion(Xn @ Yn.T, spec.depth)
    else:  # pragma: no cover - guarded by KernelSpec
        raise ValueError(spec.family)

    if symmetric:
        K = 0.5 * (K + K.T)
        np.fill_diagonal(K, kernel_diagonal(spec, X))
    return K


def kernel_diagonal(spec, X):
    """Vector of k(x, x) for each row of X, in closed form per family."""
    X = check_matrix(X, "X")
    n = X.shape[0]
    if spec.family == "linear":
        return np.einsum("ij,ij->i", X, X)
    if spec.family in BANDWIDTH_FAMILIES:
        return np.ones(n)
    if spec.family == "relu_ntk":
        _unit_rows(X, "X")  # reject zero vectors
        return np.full(n, float(_ntk_recursion(np.array([1.0]), spec.depth)[0]))
    raise ValueError(spec.family)  # pragma: no cover
