"""Input validation helpers shared by the estimators."""

import numpy as np


def check_matrix(X, name="X", ensure_2d=True):
    """Coerce to a float64 2-D array of samples (rows) and reject non-finite entries."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1 and ensure_2d:
        raise ValueError(f"{name} must be 2-D with samples as rows, got shape {X.shape}")
    if X.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got ndim={X.ndim}")
    if X.size and not np.isfinite(X).all():
        raise ValueError(f"{name} contains NaN or Inf entries")
    return X


def check_vector(x, name="x"):
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError(f"{name} must be 1-D, got shape {x.shape}")
    if x.size and not np.isfinite(x).all():
        raise ValueError(f"{name} contains NaN or Inf entries")
    return x


def check_same_features(X, Y, names=("X", "Y")):
    if X.shape[1] != Y.shape[1]:
        raise ValueError(
            f"{names[0]} and {names[1]} disagree on feature dimension: "
            f"{X.shape[1]} vs {Y.shape[1]}"
        )


def check_square(M, name="M"):
    M = np.asarray(M, dtype=np.float64)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"{name} must be square, got shape {M.shape}")
    if not np.isfinite(M).all():
        raise ValueError(f"{name} contains NaN or Inf entries")
    return M
