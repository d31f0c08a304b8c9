"""Exception types shared across the package."""


class SpincorrError(Exception):
    """Base class for all package errors."""


class InvalidDimension(SpincorrError, ValueError):
    pass


class NotHermitian(SpincorrError, ValueError):
    pass


class InvalidState(SpincorrError, ValueError):
    """A matrix violates the density-matrix invariants."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class InvalidSpec(SpincorrError, ValueError):
    pass


class InvalidTemperature(SpincorrError, ValueError):
    pass


class InvalidInput(SpincorrError, ValueError):
    pass


class InvalidGrid(SpincorrError, ValueError):
    pass


class NumericalFailure(SpincorrError, ArithmeticError):
    """Raised when an iterative routine fails to converge.

    ``index`` holds the flat batch index of the first offending matrix
    so that callers working on batches can name the bad input.
    """

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class MatrixOverflow(SpincorrError, OverflowError):
    pass


class SweepIOError(SpincorrError, OSError):
    pass
