"""Exception types shared across the package."""


class NonGaussError(Exception):
    """Base class for all package errors."""


class DimensionLimitError(NonGaussError):
    """Requested Hilbert-space dimension exceeds the configured hard limit."""


class ConfigMismatchError(NonGaussError):
    """Operands were built over different mode configurations."""


class StateValidationError(NonGaussError):
    """Matrix is not an acceptable density matrix (hermiticity/trace/positivity)."""


class UncertaintyViolationError(NonGaussError):
    """Covariance matrix violates the uncertainty principle V + (i/2)Omega >= 0."""


class TruncationError(NonGaussError):
    """Fock cutoff too small for the requested construction."""


class TruncationWarning(UserWarning):
    """State carries non-negligible population in its top Fock levels."""
