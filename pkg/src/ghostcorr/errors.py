"""Exception types raised across the package."""


class GhostCorrError(Exception):
    """Base class for all package errors."""


class DomainError(GhostCorrError, ValueError):
    """A parameter lies outside the domain of the operation."""


class NumericDegeneracyError(GhostCorrError, ArithmeticError):
    """A discriminant or denominator vanished beyond tolerance."""


class InconsistentStateError(GhostCorrError, ValueError):
    """The covariance entries contradict each other (e.g. pure mode with correlations)."""


class InsufficientDataError(GhostCorrError, ValueError):
    """Too few samples for an estimator."""


class ResolutionError(GhostCorrError, ValueError):
    """A grid is too coarse for the requested quantity."""
