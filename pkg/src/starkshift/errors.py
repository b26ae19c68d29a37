"""Exception types shared across the package."""


class StarkShiftError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(StarkShiftError):
    """Invalid, unparseable, or inconsistent configuration."""


class NoGuidedModeError(StarkShiftError):
    """The requested transverse mode is below cutoff at this frequency."""


class DegenerateModeError(StarkShiftError):
    """The requested mode sits exactly at cutoff (non-normalizable tail)."""


class QuadratureError(StarkShiftError):
    """Adaptive quadrature failed to reach the requested tolerance."""

    def __init__(self, message, worst_interval=None, error_estimate=None):
        super().__init__(message)
        self.worst_interval = worst_interval
        self.error_estimate = error_estimate


class SingularConfigurationError(StarkShiftError):
    """Atom placed on a mode node while that mode carries a nonzero shift."""


class InsufficientSignalError(StarkShiftError):
    """Field modulation too weak for a meaningful envelope fit."""


class UndersampledLineError(StarkShiftError):
    """Requested sampling violates the Nyquist guard for the field line."""

    def __init__(self, message, required_samples=None):
        super().__init__(message)
        self.required_samples = required_samples
