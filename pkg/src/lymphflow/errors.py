"""Exception hierarchy shared by all lymphflow modules."""


class LymphflowError(Exception):
    """Base class for every error raised by the package."""


class ParameterError(LymphflowError, ValueError):
    """An input record violates its invariants.

    ``field`` names the offending entry when there is a single culprit.
    """

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class DomainError(LymphflowError, ValueError):
    """A function was evaluated outside its mathematical domain."""


class SingularityError(DomainError):
    """Evaluation hit a pole of a constitutive law."""


class UnsupportedConfigurationError(LymphflowError, ValueError):
    """The request is valid input but outside what the analysis supports."""


class NumericalError(LymphflowError, RuntimeError):
    """Base class for numerical failures (exit code 3 in the CLI)."""


class ConvergenceError(NumericalError):
    """An iterative solver failed to converge; ``best`` holds its best iterate."""

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class EventResolutionError(NumericalError):
    """Time integration failed near a switching event."""

    def __init__(self, message, state=None, t=None):
        super().__init__(message)
        self.state = state
        self.t = t


class MapEvaluationError(NumericalError):
    """The Poincare map could not bracket a return crossing."""


class ExistenceError(NumericalError):
    """No sign change of the fixed-point residual was found in the bracket."""


class CollapseError(NumericalError):
    """A vessel solver produced a nonpositive radius or area."""

    def __init__(self, message, snapshot=None):
        super().__init__(message)
        self.snapshot = snapshot


class StabilityError(NumericalError):
    """The explicit time step fell below the admissible floor."""
