"""Exception hierarchy shared by all modules."""


class SaddleNodeError(Exception):
    """Base class for every error raised by the package."""


class ParameterBoxError(SaddleNodeError, ValueError):
    """Parameters lie outside the admissible box."""


class DomainError(SaddleNodeError, ValueError):
    """A function was evaluated outside its real domain."""


class SingularLocusError(DomainError):
    """Evaluation on a polar locus or at a chart singularity."""


class ConvergenceError(SaddleNodeError, RuntimeError):
    """An iterative method failed to converge."""


class SingularJacobianError(ConvergenceError):
    pass


class IntegrationError(SaddleNodeError, RuntimeError):
    """ODE integration ended without reaching its target.

    ``status`` carries the integrator status name (e.g. ``"STEP_UNDERFLOW"``).
    """

    def __init__(self, message, status=None):
        super().__init__(message)
        self.status = status


class OrbitNotClosedError(IntegrationError):
    """No return to the section: the start point is likely outside the period annulus."""


class UnresolvedBracketError(SaddleNodeError, RuntimeError):
    """The sign of a derivative could not be certified inside a bracket."""
