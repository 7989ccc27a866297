"""Exception hierarchy shared across the toolkit."""


class MvccaError(Exception):
    """Base class for all toolkit errors."""


class DimensionMismatch(MvccaError):
    """Operands have incompatible shapes."""


class NotSymmetric(MvccaError):
    """Matrix deviates from symmetry beyond tolerance."""


class NotPositiveDefinite(MvccaError):
    """Cholesky pivot collapsed; matrix is singular or indefinite."""


class NoConvergence(MvccaError):
    """Iterative solver hit its sweep cap without converging."""


class SampleCountMismatch(MvccaError):
    """Views disagree on the number of samples."""


class TooFewSamples(MvccaError):
    """Fewer than two samples; correlations undefined."""


class ConfigError(MvccaError):
    """Invalid configuration value."""


class UnknownView(MvccaError):
    """View name not present in the model."""


class IoError(MvccaError):
    """Underlying file operation failed."""


class FormatError(MvccaError):
    """File contents violate the expected format."""


class EmptyBank(MvccaError):
    """Retrieval bank holds no rows."""


class EmptyInput(MvccaError):
    """Aggregate requested over an empty collection."""


class DegenerateInput(MvccaError):
    """Input carries no usable variation (e.g. all values equal)."""
