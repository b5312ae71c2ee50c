"""Kernel representation learning toolkit.

Contrastive kernel embeddings (closed-form and gradient-descent variants), a
kernel autoencoder with an optional de-noising mode, a kernel PCA baseline,
k-NN downstream evaluation with leave-one-out bandwidth selection, and a
reproducible experiment harness for small tabular datasets.
"""

from .autoencoder import (
    KernelAutoencoder,
    autoencoder_gradient,
    autoencoder_objective,
    ridge_reconstruction,
)
from .datasets import (
    Dataset,
    SplitIndices,
    TripletSet,
    corrupt,
    load_csv,
    make_blobs,
    make_circles,
    make_cubes,
    make_moons,
    make_triplets,
    split,
)
from .diagnostics import BoundReport, bound_report, complexity_terms, model_norms, unit_sphere_kernel_max
from .harness import ExperimentConfig, run_experiment, write_aggregates, write_results
from .kernels import KernelSpec, gram, kernel_diagonal, kernel_value
from .kpca import KernelPCA
from .linalg import PSDSolver, SymEig, inv_sqrt_psd, ridge_solve, sym_eig
from .neighbors import KNNClassifier, accuracy, bandwidth_grid, loo_knn_accuracy, select_bandwidth
from .serialization import load_model, save_model
from .simple import SimpleContrastive, assemble_gram_system
from .spectral import SpectralContrastive, spectral_grad, spectral_loss

__version__ = "0.1.0"

__all__ = [
    "KernelSpec", "gram", "kernel_value", "kernel_diagonal",
    "SymEig", "sym_eig", "inv_sqrt_psd", "ridge_solve", "PSDSolver",
    "Dataset", "SplitIndices", "TripletSet",
    "make_circles", "make_moons", "make_blobs", "make_cubes",
    "load_csv", "split", "make_triplets", "corrupt",
    "SimpleContrastive", "assemble_gram_system",
    "SpectralContrastive", "spectral_loss", "spectral_grad",
    "KernelAutoencoder", "ridge_reconstruction", "autoencoder_objective", "autoencoder_gradient",
    "KernelPCA",
    "KNNClassifier", "accuracy", "bandwidth_grid", "loo_knn_accuracy", "select_bandwidth",
    "BoundReport", "complexity_terms", "model_norms", "unit_sphere_kernel_max", "bound_report",
    "ExperimentConfig", "run_experiment", "write_results", "write_aggregates",
    "save_model", "load_model",
    "__version__",
]
