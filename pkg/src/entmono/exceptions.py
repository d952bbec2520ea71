"""Exception types raised across entmono."""


class EntmonoError(Exception):
    """Base class for all entmono errors."""


class ShapeError(EntmonoError, ValueError):
    """Dimensions of an input do not match what the operation needs."""


class SizeError(ShapeError):
    """A result would exceed the supported matrix size."""


class InvalidStateError(EntmonoError, ValueError):
    """A matrix or vector violates a density-operator / pure-state invariant."""


class NumericError(EntmonoError, ArithmeticError):
    """An iterative routine failed to converge.

    ``best`` carries whatever partial result was available when the
    routine gave up (may be None).
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best
