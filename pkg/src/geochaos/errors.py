"""Exception types shared across the package."""


class GeochaosError(Exception):
    """Base class for all package-specific errors."""


class UnsupportedFamilyError(GeochaosError):
    """The requested distribution family is not one of the supported names."""


class DomainError(GeochaosError):
    """Parameters or points lie outside the declared open domain."""


class SingularMetricError(GeochaosError):
    """The metric is not positive definite (or not invertible) at a point."""


class QuadratureError(GeochaosError):
    """Quadrature refinement failed to converge to the requested tolerance.

    Carries the last two estimates so callers can inspect the gap.
    """

    def __init__(self, message, last=None, previous=None):
        super().__init__(message)
        self.last = last
        self.previous = previous


class DomainExitError(GeochaosError):
    """A trajectory reached the boundary of the open parameter domain.

    ``tau`` is the parameter time of the exit, ``state`` the last valid
    (theta, velocity) state accepted by the integrator.
    """

    def __init__(self, message, tau, state):
        super().__init__(message)
        self.tau = tau
        self.state = state


class StiffnessError(GeochaosError):
    """The adaptive integrator underflowed its step size."""


class FitError(GeochaosError):
    """A least-squares fit received data it cannot handle (e.g. y <= 0)."""


class ConfigError(GeochaosError):
    """Invalid experiment configuration; ``path`` names the offending field."""

    def __init__(self, path, message):
        super().__init__(f"{path}: {message}")
        self.path = path
