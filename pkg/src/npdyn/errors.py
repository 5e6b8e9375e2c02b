"""Exception hierarchy shared by every module."""


class NpdynError(Exception):
    """Base class for all library errors."""


class EvaluationError(NpdynError):
    """A field or map returned a non-finite value."""

    def __init__(self, message, coordinate=None):
        super().__init__(message)
        self.coordinate = coordinate


class DegenerateOrderError(NpdynError):
    """Antisymmetric order exceeds what the dimension supports."""


class DimensionError(NpdynError, ValueError):
    pass


class ShapeError(NpdynError, ValueError):
    pass


class SingularStructureError(NpdynError):
    """The Faddeev-Jackiw two-form is not invertible at the point."""


class IrreversibilityError(NpdynError):
    """The step Jacobian is singular, so no costate update exists."""


class GridError(NpdynError, ValueError):
    pass


class ConfigError(NpdynError, ValueError):
    """Invalid user configuration (CLI exit code 2)."""


class IntegrationError(NpdynError):
    """Failure during time stepping.

    ``partial`` holds the samples recorded before the failure (a
    :class:`~npdyn.flows.Trajectory`) once the integrator has attached it.
    """

    def __init__(self, message, t=None):
        super().__init__(message)
        self.t = t
        self.partial = None


class BlowUpError(IntegrationError):
    """State became non-finite; ``t`` is the last time with a finite state."""


class ConvergenceError(IntegrationError):
    """Implicit stage iteration did not converge."""


class CollisionError(IntegrationError):
    """Two point vortices came closer than the collision threshold."""

    def __init__(self, message, pair=None, t=None):
        super().__init__(message, t=t)
        self.pair = pair
