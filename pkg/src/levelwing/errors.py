"""Exception hierarchy shared by all simulator modules.

Every error carries a short category string used by the CLI to pick an
exit code, so failures stay distinguishable in scripts.
"""


class SimulatorError(Exception):
    """Base class for everything raised on purpose by this package."""

    category = "error"


class ConfigError(SimulatorError):
    """Invalid configuration: bad file, missing key, or unphysical value."""

    category = "config"


class AirDataError(SimulatorError):
    """Air-data quantities requested outside their valid domain."""

    category = "airdata"


class SingularityError(SimulatorError):
    """Pitch approached +/-90 deg where Euler kinematics blow up."""

    category = "dynamics"

    def __init__(self, message: str, state=None):
        super().__init__(message)
        self.state = state


class IntegrationFaultError(SimulatorError):
    """Non-finite state produced by the integrator."""

    category = "dynamics"

    def __init__(self, message: str, state=None):
        super().__init__(message)
        self.state = state


class TrimFailureError(SimulatorError):
    """Trim solver failed to converge or converged outside limits."""

    category = "trim"

    def __init__(self, message: str, residual: float | None = None):
        super().__init__(message)
        self.residual = residual


class UncontrollablePlantError(SimulatorError):
    """Gain synthesis requested for a plant with zero control effectiveness."""

    category = "control"


class UndefinedBearingError(SimulatorError):
    """Bearing from an orbit center requested at the center itself."""

    category = "guidance"


class InsufficientDataError(SimulatorError):
    """Statistics requested over a series too short to be meaningful."""

    category = "metrics"


class DomainError(SimulatorError):
    """Metric evaluated outside its mathematical domain."""

    category = "metrics"
