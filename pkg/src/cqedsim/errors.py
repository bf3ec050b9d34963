"""Exception classes shared across the package.

The CLI maps these onto exit codes: configuration problems exit with 2,
numerical failures with 3, I/O problems with 1.
"""


class ConfigError(ValueError):
    """Malformed or semantically invalid run configuration."""


class NumericalError(RuntimeError):
    """Base class for failures of the numerical machinery at run time."""


class TruncationError(NumericalError):
    """Photon-number cutoff too small for the requested state or dynamics."""


class NonFiniteError(NumericalError):
    """A NaN or Inf appeared during integration."""

    def __init__(self, message, t=None):
        super().__init__(message)
        self.t = t


class StepUnderflowError(NumericalError):
    """Adaptive step control could not satisfy the tolerance above dt_min."""


class NormDriftError(NumericalError):
    """State norm drifted beyond the configured bound (integrator misuse)."""


class ConstraintDriftError(NumericalError):
    """Mean-field constraint drifted beyond the configured bound."""


class ResourceLimitError(NumericalError):
    """A search exceeded its configured ceiling."""
