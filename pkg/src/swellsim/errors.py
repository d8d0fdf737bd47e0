"""Exception types shared across the package."""


class SwellsimError(Exception):
    """Base class for all package errors."""


class SingularMatrix(SwellsimError):
    """Matrix inversion requested for a (numerically) singular matrix."""


class DimensionMismatch(SwellsimError):
    """Coefficient vector or tensor shape does not match the target space."""


class NonPositiveStretch(SwellsimError):
    """Swelling stretch evaluated to a non-positive value."""


class DegenerateState(SwellsimError):
    """Constitutive evaluation at a state with det F <= 0."""


class LossOfPositivity(SwellsimError):
    """det F (or rho) dropped below the positivity floor during transport.

    Carries the offending minimum and the time at which it occurred so the
    driver can report a diagnostic instead of propagating NaNs.
    """

    def __init__(self, message, min_detf=None, time=None):
        super().__init__(message)
        self.min_detf = min_detf
        self.time = time


class AllPeriodic(SwellsimError):
    """Boundary quadrature requested on a box that is periodic in every axis."""


class NonlinearSolveFailure(SwellsimError):
    """Newton iteration did not reach tolerance.

    Keeps the last iterate and residual norm so the caller can decide on
    time-step control.
    """

    def __init__(self, message, last_iterate=None, residual_norm=None, iterations=None):
        super().__init__(message)
        self.last_iterate = last_iterate
        self.residual_norm = residual_norm
        self.iterations = iterations


class SolverFailure(SwellsimError):
    """A run aborted: step rejection exhausted the time-step floor."""

    def __init__(self, message, step=None, time=None, cause=None):
        super().__init__(message)
        self.step = step
        self.time = time
        self.cause = cause


class ConfigError(SwellsimError):
    """Scenario configuration is malformed; message names the offending key."""
