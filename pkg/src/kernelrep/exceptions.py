"""Exception types raised by kernelrep beyond the builtin ValueError."""


class KernelRepError(Exception):
    """Base class for kernelrep-specific failures."""


class NotPSDError(KernelRepError):
    """A matrix required to be positive semidefinite has a significantly negative eigenvalue."""


class SingularMatrixError(KernelRepError):
    """A linear system could not be solved; raise the jitter or the ridge parameter."""


class OptimizationError(KernelRepError):
    """Gradient descent diverged; retry with a smaller step size."""


class RankError(KernelRepError):
    """Requested more components than the numerical rank supports."""


class SplitError(KernelRepError):
    """A dataset split could not satisfy the stratification constraints."""


class LoadError(KernelRepError):
    """A data file could not be parsed."""


class SelectionError(KernelRepError):
    """Bandwidth selection failed for every candidate value."""
