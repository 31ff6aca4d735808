"""Exception hierarchy shared by all modules."""


class SphereFracError(Exception):
    """Base class for library errors."""


class DomainError(SphereFracError, ValueError):
    """An argument lies outside the range where an operation is defined."""


class PoleError(DomainError):
    """A formula is evaluated at one of its poles."""


class MeanNotZeroError(DomainError):
    """A negative power was requested for input with nonzero mean."""


class NonIntegrableError(DomainError):
    """A kernel profile is too singular for the requested integral."""


class ToleranceError(SphereFracError, ArithmeticError):
    """Quadrature or series failed to reach the requested tolerance.

    Attributes
    ----------
    value : float or ndarray
        Best estimate available when refinement stopped.
    error : float or ndarray
        Error estimate attached to ``value``.
    """

    def __init__(self, message, value=None, error=None):
        super().__init__(message)
        self.value = value
        self.error = error
