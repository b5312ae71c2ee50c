"""Downstream evaluation: k-NN classification and leave-one-out bandwidth selection."""

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.exceptions import NotFittedError

from .exceptions import SelectionError
from .validation import check_matrix


def bandwidth_grid(num=15, start=0.01, stop=100.0):
    """Log-spaced candidate bandwidths, endpoints included, sorted ascending."""
    if num < 1:
        raise ValueError("num must be >= 1")
    return np.geomspace(start, stop, num)


class KNNClassifier(BaseEstimator, ClassifierMixin):
    """Majority-vote k-nearest-neighbors with fully deterministic tie-breaking.

    Distance ties prefer the lower stored index; vote ties fall back to the
    label of the single nearest neighbor.
    """

    def __init__(self, k=3):
        self.k = k

    def fit(self, X, y):
        X = check_matrix(X, "X")
        y = np.asarray(y, dtype=np.int64)
        if y.shape != (X.shape[0],):
            raise ValueError(f"y must have shape ({X.shape[0]},), got {y.shape}")
        if X.shape[0] == 0:
            raise ValueError("cannot fit a k-NN classifier on zero samples")
        if not 1 <= self.k <= X.shape[0]:
            raise ValueError(f"k must be in [1, {X.shape[0]}], got {self.k}")
        self.X_ = X.copy()
        self.y_ = y.copy()
        return self

    def _vote(self, dists, exclude=None):
        if exclude is not None:
            dists = dists.copy()
            dists[exclude] = np.inf
        order = np.argsort(dists, kind="stable")  # stable: index breaks distance ties
        k = min(self.k, order.size - (1 if exclude is not None else 0))
        nearest = order[:k]
        votes = np.bincount(self.y_[nearest])
        winners = np.flatnonzero(votes == votes.max())
        if winners.size == 1:
            return int(winners[0])
        return int(self.y_[nearest[0]])

    def predict(self, X):
        if not hasattr(self, "X_"):
            raise NotFittedError("KNNClassifier instance is not fitted yet")
        X = check_matrix(X, "X")
        if X.shape[1] != self.X_.shape[1]:
            raise ValueError(f"X has {X.shape[1]} features, expected {self.X_.shape[1]}")
        diffs = X[:, None, :] - self.X_[None, :, :]
        dists = np.sqrt(np.einsum("mnj,mnj->mn", diffs, diffs))
        return np.array([self._vote(row) for row in dists], dtype=np.int64)

    def score(self, X, y):
        """Fraction of correct predictions."""
        y = np.asarray(y)
        pred = self.predict(X)
        if y.shape != pred.shape:
            raise ValueError(f"y has shape {y.shape}, expected {pred.shape}")
        return accuracy(pred, y)


def accuracy(predictions, truths):
    """Fraction of positions where predictions equal truths."""
    predictions = np.asarray(predictions)
    truths = np.asarray(truths)
    if predictions.shape != truths.shape:
        raise ValueError(
            f"length mismatch: {predictions.shape} predictions vs {truths.shape} truths"
        )
    if predictions.size == 0:
        raise ValueError("accuracy of zero samples is undefined")
    return float(np.mean(predictions == truths))


def loo_knn_accuracy(points, labels, k=3):
    """Leave-one-out k-NN accuracy over the given labeled points."""
    points = check_matrix(points, "points")
    labels = np.asarray(labels, dtype=np.int64)
    clf = KNNClassifier(k=min(k, max(points.shape[0] - 1, 1))).fit(points, labels)
    diffs = points[:, None, :] - points[None, :, :]
    dists = np.sqrt(np.einsum("mnj,mnj->mn", diffs, diffs))
    hits = [clf._vote(dists[i], exclude=i) == labels[i] for i in range(points.shape[0])]
    return float(np.mean(hits))


def select_bandwidth(embed_labeled, grid, labels, k=3):
    """Pick the bandwidth maximizing leave-one-out k-NN accuracy on the labeled set.

    ``embed_labeled(gamma)`` must train the representation at that bandwidth
    and return the embedded labeled points. Failed fits score -1 and are
    skipped; if every candidate fails a SelectionError is raised. Score ties
    prefer the smaller bandwidth.

    Returns (chosen_bandwidth, scores array aligned with the grid).
    """
    grid = np.asarray(grid, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    if labels.size < 2:
        raise SelectionError("leave-one-out selection needs at least 2 labeled samples")
    scores = np.full(grid.size, -1.0)
    errors = []
    for i, gamma in enumerate(grid):
        try:
            embedded = embed_labeled(float(gamma))
            scores[i] = loo_knn_accuracy(embedded, labels, k=k)
        except Exception as exc:  # record and move on; other grid points may work
            errors.append(f"gamma={gamma:g}: {exc}")
    if np.all(scores < 0):
        raise SelectionError(
            "representation fitting failed for every bandwidth: " + "; ".join(errors[:3])
        )
    best = int(np.argmax(scores))  # argmax returns the first (= smallest gamma) on ties
    return float(grid[best]), scores
