"""Exception hierarchy shared by the solver, the problem generators and the CLI."""


class SchrqlspError(Exception):
    """Base class for all package errors."""


class UnsupportedOperation(SchrqlspError, NotImplementedError):
    """Requested operation is not defined for the given kernel or order."""


class NumericalError(SchrqlspError, ArithmeticError):
    """A numerical invariant failed (CLI exit code 1)."""


class SingularMatrixError(NumericalError):
    pass


class InvariantViolation(NumericalError, ValueError):
    pass


class GridError(NumericalError, ValueError):
    """The auxiliary grid is unusable, e.g. p = 0 is not a grid point."""


class InputError(SchrqlspError, ValueError):
    """Malformed user input (CLI exit code 2)."""

    def __init__(self, message, line=None):
        super().__init__(message)
        self.line = line
