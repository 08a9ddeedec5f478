"""Exception types shared across the package."""


class WeldoptError(Exception):
    """Base class for all package-specific errors."""


class InvalidDataError(WeldoptError, ValueError):
    """Raised when user-supplied data (samples, controls) is unusable."""


class InvalidModelError(WeldoptError, ValueError):
    """Raised when a constructed model violates a physical requirement."""


class ConfigurationError(WeldoptError, ValueError):
    """Raised when configuration values are inconsistent or off-grid."""


class SolverError(WeldoptError, RuntimeError):
    """Raised when a nonlinear or linear solve fails to converge.

    Carries the last scaled residual norm and, when raised from a time
    loop, the index of the failing step.
    """

    def __init__(self, message, residual_norm=None, step_index=None):
        super().__init__(message)
        self.residual_norm = residual_norm
        self.step_index = step_index
