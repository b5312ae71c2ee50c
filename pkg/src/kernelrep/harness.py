"""Config-driven experiment runner.

One run sweeps seeds x methods x kernels: split the data, build triplets
from the unlabeled + labeled features, pick bandwidths by leave-one-out
validation on the labeled split, fit the representation, classify the test
split with k-NN on the embeddings, and append complexity diagnostics. Rows
stream into a results CSV; per-cell aggregates (mean/sd over seeds) go into
a second CSV. Identical configs produce byte-identical CSVs apart from the
wall-time column.
"""

import csv
import json
import os
import tempfile
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import datasets as ds
from .autoencoder import KernelAutoencoder
from .diagnostics import bound_report
from .exceptions import KernelRepError
from .kernels import KernelSpec
from .kpca import KernelPCA
from .neighbors import KNNClassifier, bandwidth_grid, select_bandwidth
from .simple import SimpleContrastive
from .spectral import SpectralContrastive

METHODS = ("raw", "kpca", "simple", "spectral", "ae", "ae_denoise")

RESULT_HEADER = (
    "dataset,method,kernel,bandwidth,seed,metric_name,metric_value,fit_ms,"
    "alpha,kappa,gamma,w_norm_sq"
)
AGGREGATE_HEADER = "dataset,method,kernel,metric_name,mean,sd,n_seeds"

DEFAULT_SEEDS = (0, 1, 2, 3, 4)
DEFAULT_LAMBDAS = {"spectral": 1e-3, "ae": 1e-3, "ae_denoise": 1e-2}
#: decoder kernel bandwidth on the unit-norm bottleneck sphere
DECODER_GAMMA = 1.0


@dataclass
class OptimizerSettings:
    step: float = 1e-2
    max_iters: int = 250
    tol: float = 1e-4

    def validate(self):
        if self.step <= 0 or self.max_iters < 0 or self.tol <= 0:
            raise ValueError(f"invalid optimizer settings {self}")


@dataclass
class ExperimentConfig:
    """Everything one experiment needs; see README for the JSON schema."""

    dataset: dict
    methods: tuple = METHODS
    kernels: tuple = (
        KernelSpec("gaussian"),
        KernelSpec("laplacian"),
        KernelSpec("linear"),
        KernelSpec("relu_ntk", depth=2),
    )
    n_components: int = 2
    lambdas: dict = field(default_factory=lambda: dict(DEFAULT_LAMBDAS))
    fractions: tuple = (0.50, 0.05, 0.45)
    seeds: tuple = DEFAULT_SEEDS
    aug_sd: float = 0.1
    noise_sd: float = 0.1
    knn_k: int = 3
    grid_num: int = 15
    grid_start: float = 0.01
    grid_stop: float = 100.0
    optimizer: OptimizerSettings = field(default_factory=OptimizerSettings)
    jitter_scale: float = 1e-10
    fixed_bandwidths: Optional[dict] = None
    out_dir: str = "results"

    def validate(self):
        if not self.seeds:
            raise ValueError("seeds must be nonempty")
        if self.n_components < 1:
            raise ValueError("h must be >= 1")
        fr = tuple(float(f) for f in self.fractions)
        if len(fr) != 3 or any(f <= 0 for f in fr) or abs(sum(fr) - 1.0) > 1e-9:
            raise ValueError(f"fractions must be 3 positive values summing to 1, got {fr}")
        for m in self.methods:
            if m not in METHODS:
                raise ValueError(f"unknown method {m!r}; expected subset of {METHODS}")
        if not self.methods:
            raise ValueError("methods must be nonempty")
        for m, lam in self.lambdas.items():
            if lam <= 0:
                raise ValueError(f"lambda for {m} must be > 0, got {lam}")
        if self.knn_k < 1:
            raise ValueError("knn_k must be >= 1")
        if self.grid_num < 1 or self.grid_start <= 0 or self.grid_stop < self.grid_start:
            raise ValueError("invalid bandwidth grid")
        self.optimizer.validate()
        self.load_dataset()  # fail fast on bad dataset settings
        return self

    @classmethod
    def from_dict(cls, raw):
        raw = dict(raw)
        known = {
            "dataset", "methods", "kernels", "h", "lambda", "fractions", "seeds",
            "aug_sd", "noise_sd", "knn_k", "grid", "optimizer", "jitter_scale",
            "out_dir", "fixed_bandwidths",
        }
        unknown = set(raw) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        if "dataset" not in raw:
            raise ValueError("config requires a 'dataset' entry")
        dataset = raw["dataset"]
        if isinstance(dataset, str):
            dataset = {"name": dataset}
        kwargs = {"dataset": dataset}
        if "methods" in raw:
            kwargs["methods"] = tuple(raw["methods"])
        if "kernels" in raw:
            kernels = []
            for item in raw["kernels"]:
                if isinstance(item, str):
                    item = {"family": item}
                kernels.append(KernelSpec(**item))
            kwargs["kernels"] = tuple(kernels)
        if "h" in raw:
            kwargs["n_components"] = int(raw["h"])
        if "lambda" in raw:
            lam = raw["lambda"]
            lambdas = dict(DEFAULT_LAMBDAS)
            if isinstance(lam, dict):
                lambdas.update({k: float(v) for k, v in lam.items()})
            else:
                lambdas = {m: float(lam) for m in DEFAULT_LAMBDAS}
            kwargs["lambdas"] = lambdas
        if "fractions" in raw:
            kwargs["fractions"] = tuple(raw["fractions"])
        if "seeds" in raw:
            kwargs["seeds"] = tuple(int(s) for s in raw["seeds"])
        for key in ("aug_sd", "noise_sd", "jitter_scale"):
            if key in raw:
                kwargs[key] = float(raw[key])
        if "knn_k" in raw:
            kwargs["knn_k"] = int(raw["knn_k"])
        if "grid" in raw:
            g = raw["grid"]
            kwargs["grid_num"] = int(g.get("num", 15))
            kwargs["grid_start"] = float(g.get("start", 0.01))
            kwargs["grid_stop"] = float(g.get("stop", 100.0))
        if "optimizer" in raw:
            kwargs["optimizer"] = OptimizerSettings(**raw["optimizer"])
        if "out_dir" in raw:
            kwargs["out_dir"] = str(raw["out_dir"])
        if "fixed_bandwidths" in raw and raw["fixed_bandwidths"] is not None:
            kwargs["fixed_bandwidths"] = {k: float(v) for k, v in raw["fixed_bandwidths"].items()}
        return cls(**kwargs).validate()

    @classmethod
    def from_json(cls, path):
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    def load_dataset(self):
        spec = dict(self.dataset)
        if "csv" in spec:
            return ds.load_csv(
                spec["csv"],
                spec.get("label_column", -1),
                has_header=spec.get("has_header", True),
            )
        name = spec.pop("name", None)
        if name not in ds.GENERATORS:
            raise ValueError(
                f"dataset name {name!r} unknown; expected one of {sorted(ds.GENERATORS)} or a csv path"
            )
        spec.setdefault("seed", 12345)  # generation seed, distinct from split seeds
        return ds.GENERATORS[name](**spec)

    def bandwidth_grid(self):
        return bandwidth_grid(self.grid_num, self.grid_start, self.grid_stop)


@dataclass
class ResultRecord:
    dataset: str
    method: str
    kernel: str
    bandwidth: str
    seed: int
    metric_name: str
    metric_value: object
    fit_ms: float
    alpha: object = ""
    kappa: object = ""
    gamma: object = ""
    w_norm_sq: object = ""

    def row(self):
        return [
            self.dataset, self.method, self.kernel, self.bandwidth, str(self.seed),
            self.metric_name, _fmt(self.metric_value), f"{self.fit_ms:.3f}",
            _fmt(self.alpha), _fmt(self.kappa), _fmt(self.gamma), _fmt(self.w_norm_sq),
        ]


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return str(v)


class _Cell:
    """One fitted (method, kernel, seed) cell: embeddings plus bookkeeping.

    Fitting only ever sees representation-training and labeled data; test
    features enter later, through embed()/reconstruct().
    """

    def __init__(self, model, embed, fit_ms, bandwidth, reconstruct=None):
        self.model = model
        self.embed = embed
        self.fit_ms = fit_ms
        self.bandwidth = bandwidth
        self.reconstruct = reconstruct


def _fit_representation(method, spec, config, rep_X, triplets, seed):
    opt = config.optimizer
    h = config.n_components
    if method == "kpca":
        model = KernelPCA(spec, n_components=h).fit(rep_X)
    elif method == "simple":
        model = SimpleContrastive(spec, n_components=h, jitter_scale=config.jitter_scale)
        model.fit(triplets)
    elif method == "spectral":
        model = SpectralContrastive(
            spec, n_components=h, alpha=config.lambdas["spectral"], step=opt.step,
            max_iters=opt.max_iters, tol=opt.tol, jitter_scale=config.jitter_scale,
            random_state=seed,
        ).fit(triplets)
    elif method in ("ae", "ae_denoise"):
        dec_family = spec.family if spec.family != "relu_ntk" else "gaussian"
        dec_spec = KernelSpec(dec_family, gamma=DECODER_GAMMA)
        model = KernelAutoencoder(
            enc_kernel=spec, dec_kernel=dec_spec, n_components=h,
            alpha=config.lambdas[method], denoising=(method == "ae_denoise"),
            noise_sd=config.noise_sd, step=opt.step, max_iters=opt.max_iters,
            tol=opt.tol, jitter_scale=config.jitter_scale, random_state=seed,
        ).fit(rep_X)
    else:  # pragma: no cover
        raise ValueError(method)
    return model


def _fit_cell(method, kernel, config, rep_X, labeled_X, labeled_y, triplets, seed):
    """Fit one cell, selecting the bandwidth by LOO when the kernel has one."""
    if method == "raw":
        return _Cell(model=None, embed=lambda Q: Q, fit_ms=0.0, bandwidth="n/a")

    chosen = "n/a"
    spec = kernel
    if kernel.needs_bandwidth:
        pinned = (config.fixed_bandwidths or {}).get(kernel.family)
        if pinned is not None:
            spec = kernel.with_gamma(pinned)
            chosen = repr(float(pinned))
        else:
            def embed_labeled(gamma):
                m = _fit_representation(
                    method, kernel.with_gamma(gamma), config, rep_X, triplets, seed
                )
                return m.transform(labeled_X)

            gamma, _scores = select_bandwidth(
                embed_labeled, config.bandwidth_grid(), labeled_y, k=config.knn_k
            )
            spec = kernel.with_gamma(gamma)
            chosen = repr(float(gamma))

    start = time.perf_counter()
    model = _fit_representation(method, spec, config, rep_X, triplets, seed)
    fit_ms = (time.perf_counter() - start) * 1e3
    reconstruct = model.reconstruct if isinstance(model, KernelAutoencoder) else None
    return _Cell(model, model.transform, fit_ms, chosen, reconstruct)


def _diag_fields(cell, method, config, triplets):
    if cell.model is None:
        return {}
    trip = triplets if method in ("simple", "spectral") else None
    kern = getattr(cell.model, "kernel", None) or cell.model.enc_kernel
    reg = config.lambdas.get(method, 0.0)
    rep = bound_report(
        cell.model, triplets=trip, kernel=kern, h=config.n_components, reg=reg
    )
    return {
        "alpha": rep.alpha,
        "kappa": rep.kappa,
        "gamma": rep.gamma,
        "w_norm_sq": rep.w_norm_sq_total,
    }


def run_experiment(config, log=None):
    """Execute the full protocol; returns (records, aggregate rows).

    Each failed cell becomes a row with metric_name="error" and the message
    in the metric_value field; other cells keep running.
    """
    data = config.load_dataset()
    if data.y is None:
        raise ValueError("experiment datasets need labels")
    records = []

    for seed in config.seeds:
        sp = ds.split(data, config.fractions, seed=seed)
        assert np.intersect1d(sp.representation, sp.test).size == 0
        rep_X = data.X[sp.representation]
        labeled_X, labeled_y = data.X[sp.labeled], data.y[sp.labeled]
        test_X, test_y = data.X[sp.test], data.y[sp.test]
        triplets = ds.make_triplets(rep_X, aug_sd=config.aug_sd, seed=seed)
        noisy_test = (
            ds.corrupt(test_X, config.noise_sd, seed=[seed, 1])
            if "ae_denoise" in config.methods
            else None
        )

        for method in config.methods:
            kernel_list = [None] if method == "raw" else config.kernels
            for kernel in kernel_list:
                label = "none" if kernel is None else kernel.label()
                base = dict(dataset=data.name, method=method, kernel=label, seed=seed)
                try:
                    cell = _fit_cell(
                        method, kernel, config, rep_X, labeled_X, labeled_y, triplets, seed
                    )
                    clf = KNNClassifier(k=min(config.knn_k, labeled_X.shape[0])).fit(
                        cell.embed(labeled_X), labeled_y
                    )
                    acc = clf.score(cell.embed(test_X), test_y)
                    diag = _diag_fields(cell, method, config, triplets)
                    records.append(ResultRecord(
                        bandwidth=cell.bandwidth, metric_name="accuracy",
                        metric_value=float(acc), fit_ms=cell.fit_ms, **base, **diag,
                    ))
                    if method == "ae_denoise":
                        recon = cell.reconstruct(noisy_test)
                        mse = float(np.mean((recon - test_X) ** 2))
                        records.append(ResultRecord(
                            bandwidth=cell.bandwidth, metric_name="mse",
                            metric_value=mse, fit_ms=cell.fit_ms, **base, **diag,
                        ))
                    if log:
                        log(f"done {data.name} seed={seed} {method} {label} acc={acc:.3f}")
                except (KernelRepError, ValueError) as exc:
                    records.append(ResultRecord(
                        bandwidth="n/a", metric_name="error", metric_value=str(exc),
                        fit_ms=0.0, **base,
                    ))
                    if log:
                        log(f"FAILED {data.name} seed={seed} {method} {label}: {exc}")
                if method == "raw":
                    break

        if noisy_test is not None:
            # identity baseline for the de-noising comparison: keep the noisy input
            mse = float(np.mean((noisy_test - test_X) ** 2))
            records.append(ResultRecord(
                dataset=data.name, method="raw", kernel="none", bandwidth="n/a",
                seed=seed, metric_name="mse", metric_value=mse, fit_ms=0.0,
            ))

    aggregates = aggregate(records)
    return records, aggregates


def aggregate(records):
    """Mean/sd (ddof=0) of each (dataset, method, kernel, metric) over seeds."""
    groups = {}
    for rec in records:
        if rec.metric_name == "error":
            continue
        key = (rec.dataset, rec.method, rec.kernel, rec.metric_name)
        groups.setdefault(key, []).append(float(rec.metric_value))
    rows = []
    for key in sorted(groups):
        vals = np.asarray(groups[key])
        rows.append(list(key) + [repr(float(vals.mean())), repr(float(vals.std())), str(vals.size)])
    return rows


def _atomic_write(path, write_fn):
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="", encoding="utf-8") as fh:
            write_fn(fh)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_results(records, path):
    def _write(fh):
        writer = csv.writer(fh)
        writer.writerow(RESULT_HEADER.split(","))
        for rec in records:
            writer.writerow(rec.row())

    _atomic_write(path, _write)


def write_aggregates(rows, path):
    def _write(fh):
        writer = csv.writer(fh)
        writer.writerow(AGGREGATE_HEADER.split(","))
        writer.writerows(rows)

    _atomic_write(path, _write)
