"""Versioned save/load for fitted models (single .npz file per model)."""

import json

import numpy as np

from .autoencoder import KernelAutoencoder
from .datasets import TripletSet
from .exceptions import LoadError
from .kernels import KernelSpec
from .kpca import KernelPCA
from .simple import SimpleContrastive
from .spectral import SpectralContrastive

FORMAT_VERSION = 1

_MODEL_TYPES = {
    "simple": SimpleContrastive,
    "spectral": SpectralContrastive,
    "autoencoder": KernelAutoencoder,
    "kpca": KernelPCA,
}


def _spec_dict(spec):
    return {"family": spec.family, "gamma": spec.gamma, "depth": spec.depth}


def save_model(model, path):
    """Serialize a fitted model to `path` (numpy .npz with a JSON header)."""
    arrays = {}
    if isinstance(model, SimpleContrastive):
        kind = "simple"
        meta = {"kernel": _spec_dict(model.kernel), "n_components": model.n_components,
                "jitter_scale": model.jitter_scale}
        t = model.triplets_
        arrays.update(coef=model.coef_, constraint_gram=model.constraint_gram_,
                      eigenvalues=model.eigenvalues_, anchors=t.anchors,
                      positives=t.positives, negatives=t.negatives)
        meta["objective_value"] = model.objective_value_
        meta["degenerate"] = model.degenerate_
    elif isinstance(model, SpectralContrastive):
        kind = "spectral"
        meta = {"kernel": _spec_dict(model.kernel), "n_components": model.n_components,
                "alpha": model.alpha, "jitter_scale": model.jitter_scale,
                "loss": model.loss_}
        arrays.update(points=model.points_, embedding=model.embedding_,
                      dual_coef=model.dual_coef_)
    elif isinstance(model, KernelAutoencoder):
        kind = "autoencoder"
        meta = {"enc_kernel": _spec_dict(model.enc_kernel),
                "dec_kernel": _spec_dict(model.dec_kernel),
                "n_components": model.n_components, "alpha": model.alpha,
                "denoising": model.denoising, "jitter_scale": model.jitter_scale,
                "objective": model.objective_}
        arrays.update(X_fit=model.X_fit_, X_enc=model.X_enc_, embedding=model.embedding_,
                      dual_coef=model.dual_coef_, decoder_coef=model.decoder_coef_,
                      reconstruction=model.reconstruction_)
    elif isinstance(model, KernelPCA):
        kind = "kpca"
        meta = {"kernel": _spec_dict(model.kernel), "n_components": model.n_components}
        arrays.update(X_fit=model.X_fit_, alphas=model.alphas_,
                      eigenvalues=model.eigenvalues_, scores=model.scores_,
                      col_means=model._col_means,
                      total_mean=np.array(model._total_mean))
    else:
        raise TypeError(f"cannot serialize model of type {type(model).__name__}")

    header = {"format_version": FORMAT_VERSION, "kind": kind, "meta": meta}
    np.savez(path, header=np.frombuffer(json.dumps(header).encode(), dtype=np.uint8), **arrays)


def load_model(path):
    """Load a model written by save_model; returns a fitted estimator."""
    with np.load(path) as data:
        try:
            header = json.loads(bytes(data["header"]).decode())
        except Exception as exc:
            raise LoadError(f"{path}: missing or corrupt model header") from exc
        if header.get("format_version") != FORMAT_VERSION:
            raise LoadError(
                f"{path}: unsupported format version {header.get('format_version')}"
            )
        kind = header["kind"]
        meta = header["meta"]
        if kind not in _MODEL_TYPES:
            raise LoadError(f"{path}: unknown model kind {kind!r}")
        arrays = {k: data[k] for k in data.files if k != "header"}

    if kind == "simple":
        model = SimpleContrastive(
            kernel=KernelSpec(**meta["kernel"]), n_components=meta["n_components"],
            jitter_scale=meta["jitter_scale"])
        model.triplets_ = TripletSet(arrays["anchors"], arrays["positives"], arrays["negatives"])
        model.coef_ = arrays["coef"]
        model.constraint_gram_ = arrays["constraint_gram"]
        model.eigenvalues_ = arrays["eigenvalues"]
        model.objective_value_ = meta["objective_value"]
        model.degenerate_ = meta["degenerate"]
    elif kind == "spectral":
        model = SpectralContrastive(
            kernel=KernelSpec(**meta["kernel"]), n_components=meta["n_components"],
            alpha=meta["alpha"], jitter_scale=meta["jitter_scale"])
        model.points_ = arrays["points"]
        model.embedding_ = arrays["embedding"]
        model.dual_coef_ = arrays["dual_coef"]
        model.loss_ = meta["loss"]
    elif kind == "autoencoder":
        model = KernelAutoencoder(
            enc_kernel=KernelSpec(**meta["enc_kernel"]),
            dec_kernel=KernelSpec(**meta["dec_kernel"]),
            n_components=meta["n_components"], alpha=meta["alpha"],
            denoising=meta["denoising"], jitter_scale=meta["jitter_scale"])
        model.X_fit_ = arrays["X_fit"]
        model.X_enc_ = arrays["X_enc"]
        model.embedding_ = arrays["embedding"]
        model.dual_coef_ = arrays["dual_coef"]
        model.decoder_coef_ = arrays["decoder_coef"]
        model.reconstruction_ = arrays["reconstruction"]
        model.objective_ = meta["objective"]
    else:
        model = KernelPCA(kernel=KernelSpec(**meta["kernel"]), n_components=meta["n_components"])
        model.X_fit_ = arrays["X_fit"]
        model.alphas_ = arrays["alphas"]
        model.eigenvalues_ = arrays["eigenvalues"]
        model.scores_ = arrays["scores"]
        model._col_means = arrays["col_means"]
        model._total_mean = float(arrays["total_mean"])
    return model
