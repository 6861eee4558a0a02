"""Exception hierarchy shared by the numerical library and the command line."""

from typing import Optional


class FrontierLabError(Exception):
    """Base class for every error raised by Frontier Lab."""


class DomainError(FrontierLabError, ValueError):
    """An input violates a documented precondition."""


class ConvergenceError(FrontierLabError, ArithmeticError):
    """An iterative solver exhausted its budget."""

    def __init__(self, message: str, iterations: int = 0, last_update: Optional[float] = None):
        super().__init__(message)
        self.iterations = iterations
        self.last_update = last_update


class SingularDesignError(DomainError):
    """The local weighted design at an evaluation point is not invertible."""

    def __init__(self, message: str, point: Optional[float] = None):
        super().__init__(message)
        self.point = point


class DegenerateDensityError(DomainError):
    """A smooth-backfitting marginal density vanishes on the grid."""


class ZeroResidualError(DomainError):
    """The first-step fit reproduces the data exactly, so p cannot be estimated."""


class OutOfDomainError(DomainError):
    """A frontier was evaluated outside the covariate range seen in training."""


class BandwidthSelectionError(FrontierLabError):
    """Every bandwidth candidate failed during cross-validation."""


class StudyFailedError(FrontierLabError):
    """Too many Monte Carlo replicas failed."""


class SchemaError(DomainError):
    """Tabular input does not match the expected schema."""
