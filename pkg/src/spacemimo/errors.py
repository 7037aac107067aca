"""Exception types shared across the package."""


class SpaceMimoError(Exception):
    """Base class for all package errors."""


class ValidationError(SpaceMimoError, ValueError):
    """Invalid input parameter.

    ``field`` names the offending parameter when one can be identified.
    """

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class NumericalError(SpaceMimoError, ArithmeticError):
    """A decomposition or root solve failed to produce a trustworthy result."""
