"""Synthetic dataset generators, CSV loading, splits, triplets, and corruption.

Every function takes an explicit seed and is bit-reproducible: equal seeds
give equal datasets, splits, triplets and noise. Matrices use rows as
samples.
"""

import csv
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .exceptions import LoadError, SplitError
from .validation import check_matrix


@dataclass
class Dataset:
    """Feature matrix (n, d) with optional integer labels in {0..C-1}."""

    X: np.ndarray
    y: Optional[np.ndarray] = None
    name: str = "dataset"

    def __post_init__(self):
        self.X = check_matrix(self.X, "X")
        if self.y is not None:
            self.y = np.asarray(self.y)
            if self.y.shape != (self.X.shape[0],):
                raise ValueError(
                    f"labels must have shape ({self.X.shape[0]},), got {self.y.shape}"
                )
            self.y = self.y.astype(np.int64)
            classes = np.unique(self.y)
            if not np.array_equal(classes, np.arange(classes.size)):
                raise ValueError("labels must be 0..C-1 with every class nonempty")

    @property
    def n_samples(self):
        return self.X.shape[0]

    @property
    def n_features(self):
        return self.X.shape[1]

    @property
    def n_classes(self):
        return 0 if self.y is None else int(self.y.max()) + 1


@dataclass
class SplitIndices:
    """Disjoint unlabeled/labeled/test index sets covering range(n)."""

    unlabeled: np.ndarray
    labeled: np.ndarray
    test: np.ndarray
    seed: int = 0

    def __post_init__(self):
        self.unlabeled = np.asarray(self.unlabeled, dtype=np.int64)
        self.labeled = np.asarray(self.labeled, dtype=np.int64)
        self.test = np.asarray(self.test, dtype=np.int64)
        n = self.unlabeled.size + self.labeled.size + self.test.size
        merged = np.concatenate([self.unlabeled, self.labeled, self.test])
        if not np.array_equal(np.sort(merged), np.arange(n)):
            raise ValueError("split indices must be disjoint and cover range(n)")

    @property
    def representation(self):
        """Indices used to train representations: unlabeled plus labeled features."""
        return np.concatenate([self.unlabeled, self.labeled])


@dataclass
class TripletSet:
    """Column-aligned anchors/positives/negatives, each of shape (m, d)."""

    anchors: np.ndarray
    positives: np.ndarray
    negatives: np.ndarray
    negative_indices: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        self.anchors = check_matrix(self.anchors, "anchors")
        self.positives = check_matrix(self.positives, "positives")
        self.negatives = check_matrix(self.negatives, "negatives")
        if not (self.anchors.shape == self.positives.shape == self.negatives.shape):
            raise ValueError("anchors, positives and negatives must share one shape")

    def __len__(self):
        return self.anchors.shape[0]

    @property
    def n_features(self):
        return self.anchors.shape[1]

    def stacked(self):
        """All 3m training points in the order anchors, positives, negatives."""
        return np.vstack([self.anchors, self.positives, self.negatives])


def make_circles(n=200, factor=0.6, noise_sd=0.05, seed=0):
    """Two concentric circles: n/2 points at radius 1 (label 0), n/2 at `factor` (label 1).

    Angles sit on a deterministic uniform grid; the sample order is shuffled
    and Gaussian coordinate noise of sd `noise_sd` added, both driven by seed.
    """
    if n % 2 != 0:
        raise ValueError(f"n must be even, got {n}")
    if not 0 < factor < 1:
        raise ValueError(f"factor must be in (0, 1), got {factor}")
    if noise_sd < 0:
        raise ValueError("noise_sd must be >= 0")
    rng = np.random.default_rng(seed)
    half = n // 2
    angles = np.linspace(0.0, 2.0 * np.pi, half, endpoint=False)
    outer = np.column_stack([np.cos(angles), np.sin(angles)])
    inner = factor * outer
    X = np.vstack([outer, inner])
    y = np.concatenate([np.zeros(half, dtype=np.int64), np.ones(half, dtype=np.int64)])
    order = rng.permutation(n)
    X = X[order]
    if noise_sd > 0:
        X = X + rng.normal(0.0, noise_sd, size=(n, 2))
    return Dataset(X, y[order], name="circles")


def make_moons(n=200, noise_sd=0.1, seed=0):
    """Two interleaving half-circles with additive Gaussian noise."""
    if n % 2 != 0:
        raise ValueError(f"n must be even, got {n}")
    if noise_sd < 0:
        raise ValueError("noise_sd must be >= 0")
    rng = np.random.default_rng(seed)
    half = n // 2
    t = np.linspace(0.0, np.pi, half)
    upper = np.column_stack([np.cos(t), np.sin(t)])
    lower = np.column_stack([1.0 - np.cos(t), 0.5 - np.sin(t)])
    X = np.vstack([upper, lower])
    y = np.concatenate([np.zeros(half, dtype=np.int64), np.ones(half, dtype=np.int64)])
    order = rng.permutation(n)
    X = X[order]
    if noise_sd > 0:
        X = X + rng.normal(0.0, noise_sd, size=X.shape)
    return Dataset(X, y[order], name="moons")


def make_blobs(n=200, n_classes=3, n_features=2, spread=1.0, center_box=10.0, seed=0):
    """Isotropic Gaussian clusters around uniformly drawn class centers."""
    if n_classes < 1 or n < n_classes:
        raise ValueError(f"need n >= n_classes >= 1, got n={n}, n_classes={n_classes}")
    rng = np.random.default_rng(seed)
    centers = rng.uniform(-center_box, center_box, size=(n_classes, n_features))
    y = np.arange(n, dtype=np.int64) % n_classes
    rng.shuffle(y)
    X = centers[y] + rng.normal(0.0, spread, size=(n, n_features))
    return Dataset(X, y, name="blobs")


def make_cubes(n=200, n_classes=4, n_features=13, spread=0.3, seed=0):
    """Gaussian clusters at distinct vertices of the unit hypercube."""
    if n_classes < 1 or n < n_classes:
        raise ValueError(f"need n >= n_classes >= 1, got n={n}, n_classes={n_classes}")
    if n_classes > 2 ** n_features:
        raise ValueError(f"cannot place {n_classes} classes on {2 ** n_features} vertices")
    rng = np.random.default_rng(seed)
    vertex_ids = rng.choice(2 ** n_features, size=n_classes, replace=False)
    centers = (vertex_ids[:, None] >> np.arange(n_features)[None, :]) & 1
    y = np.arange(n, dtype=np.int64) % n_classes
    rng.shuffle(y)
    X = centers[y].astype(np.float64) + rng.normal(0.0, spread, size=(n, n_features))
    return Dataset(X, y, name="cubes")


GENERATORS = {
    "circles": make_circles,
    "moons": make_moons,
    "blobs": make_blobs,
    "cubes": make_cubes,
}


def load_csv(path, label_column, has_header=True, standardize=True, name=None):
    """Load a tabular CSV into a Dataset.

    Features are parsed as floats; the label column (selected by name when a
    header is present, otherwise by integer index) may be categorical and is
    mapped to 0..C-1 in first-appearance order. Features are standardized to
    zero mean and unit variance, with zero sds clamped to 1.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    rows = [r for r in rows if r]
    if not rows:
        raise LoadError(f"{path}: file is empty")

    if has_header:
        header = rows[0]
        body = rows[1:]
        if isinstance(label_column, str):
            if label_column not in header:
                raise LoadError(f"{path}: label column {label_column!r} not in header {header}")
            label_idx = header.index(label_column)
        else:
            label_idx = int(label_column)
    else:
        body = rows
        if isinstance(label_column, str):
            raise LoadError(f"{path}: label column must be an index when has_header=False")
        label_idx = int(label_column)

    if not body:
        raise LoadError(f"{path}: no data rows")
    width = len(body[0])
    if not -width <= label_idx < width:
        raise LoadError(f"{path}: label column index {label_idx} out of range for {width} columns")
    label_idx %= width

    features, raw_labels = [], []
    for i, row in enumerate(body):
        if len(row) != width:
            raise LoadError(f"{path}: row {i} has {len(row)} cells, expected {width}")
        vals = []
        for j, cell in enumerate(row):
            if j == label_idx:
                raw_labels.append(cell.strip())
                continue
            try:
                vals.append(float(cell))
            except ValueError:
                raise LoadError(f"{path}: unparseable cell at row {i}, column {j}: {cell!r}") from None
        features.append(vals)

    X = np.asarray(features, dtype=np.float64)
    if not np.isfinite(X).all():
        raise LoadError(f"{path}: non-finite feature values")
    seen = {}
    y = np.array([seen.setdefault(lbl, len(seen)) for lbl in raw_labels], dtype=np.int64)
    if standardize:
        mean = X.mean(axis=0)
        sd = X.std(axis=0)
        sd[sd == 0] = 1.0
        X = (X - mean) / sd
    return Dataset(X, y, name=name or str(path))


def split(dataset, fractions=(0.50, 0.05, 0.45), seed=0):
    """Deterministic unlabeled/labeled/test split with a class-stratified labeled set.

    Sizes are rounded from the fractions (labeled then unlabeled, remainder to
    test); every class gets at least one labeled sample.
    """
    fractions = tuple(float(f) for f in fractions)
    if len(fractions) != 3 or any(f <= 0 for f in fractions):
        raise ValueError(f"fractions must be three positive numbers, got {fractions}")
    if abs(sum(fractions) - 1.0) > 1e-9:
        raise ValueError(f"fractions must sum to 1, got sum {sum(fractions)}")
    if dataset.y is None:
        raise SplitError("split requires labels for stratification")

    n = dataset.n_samples
    y = dataset.y
    n_classes = dataset.n_classes
    n_lab = int(round(fractions[1] * n))
    n_unlab = int(round(fractions[0] * n))
    if n_lab < n_classes:
        raise SplitError(
            f"labeled fraction {fractions[1]} gives {n_lab} samples, "
            f"fewer than the {n_classes} classes to stratify"
        )
    if n_lab + n_unlab >= n:
        raise SplitError(f"split leaves no test samples for n={n} and fractions {fractions}")

    rng = np.random.default_rng(seed)
    # stratified labeled set: proportional quota per class with a floor of 1,
    # largest-remainder rounding to hit n_lab exactly
    counts = np.bincount(y, minlength=n_classes)
    if np.any(counts < 1):
        raise SplitError("every class needs at least one sample to stratify")
    quota = counts * n_lab / n
    base = np.maximum(np.floor(quota).astype(int), 1)
    base = np.minimum(base, counts)
    while base.sum() > n_lab:
        # floors exceeded the budget; shave the largest allocations above 1
        j = int(np.argmax(np.where(base > 1, base, -1)))
        if base[j] <= 1:
            raise SplitError(f"labeled fraction too small for {n_classes} classes")
        base[j] -= 1
    remainder = quota - base
    remainder[base >= counts] = -np.inf
    while base.sum() < n_lab:
        j = int(np.argmax(remainder))
        if not np.isfinite(remainder[j]):
            raise SplitError("not enough samples to fill the labeled quota")
        base[j] += 1
        remainder[j] = quota[j] - base[j]
        if base[j] >= counts[j]:
            remainder[j] = -np.inf

    labeled = []
    for c in range(n_classes):
        members = np.flatnonzero(y == c)
        take = rng.permutation(members.size)[: base[c]]
        labeled.append(members[take])
    labeled = np.sort(np.concatenate(labeled))

    rest = np.setdiff1d(np.arange(n), labeled, assume_unique=False)
    rest = rng.permutation(rest)
    unlabeled = np.sort(rest[:n_unlab])
    test = np.sort(rest[n_unlab:])
    return SplitIndices(unlabeled=unlabeled, labeled=labeled, test=test, seed=seed)


def make_triplets(X_train, aug_sd=0.1, seed=0):
    """Build contrastive triplets from training features.

    Anchors are the training rows; positives add Gaussian noise scaled per
    feature by ``aug_sd * feature sd``; negatives are uniformly resampled
    training rows with a different index.
    """
    X_train = check_matrix(X_train, "X_train")
    m = X_train.shape[0]
    if m < 2:
        raise ValueError("need at least 2 training samples to draw negatives")
    if aug_sd < 0:
        raise ValueError("aug_sd must be >= 0")
    rng = np.random.default_rng(seed)
    feature_sd = X_train.std(axis=0)
    noise = rng.normal(0.0, 1.0, size=X_train.shape) * (aug_sd * feature_sd)
    positives = X_train + noise
    neg_idx = rng.integers(0, m - 1, size=m)
    neg_idx = neg_idx + (neg_idx >= np.arange(m))
    return TripletSet(
        anchors=X_train.copy(),
        positives=positives,
        negatives=X_train[neg_idx],
        negative_indices=neg_idx,
    )


def corrupt(X, noise_sd=0.1, seed=0):
    """X plus i.i.d. Gaussian noise with entrywise sd noise_sd."""
    X = check_matrix(X, "X")
    if noise_sd < 0:
        raise ValueError("noise_sd must be >= 0")
    if noise_sd == 0:
        return X.copy()
    rng = np.random.default_rng(seed)
    return X + rng.normal(0.0, noise_sd, size=X.shape)
