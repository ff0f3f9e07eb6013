"""Exception hierarchy.  Each class maps onto one CLI exit status."""


class PrimeDeltaError(Exception):
    exit_code = 1


class PreconditionError(PrimeDeltaError, ValueError):
    """An operation refused its inputs (domain, regime or validity range)."""

    exit_code = 3


class DomainError(PreconditionError):
    pass


class BudgetExceeded(PrimeDeltaError, ValueError):
    """Input size exceeds the brute-force or memory budget of an operation."""

    exit_code = 4


class SizingError(BudgetExceeded):
    pass


class CheckpointError(PrimeDeltaError):
    exit_code = 5


class ConvergenceError(PrimeDeltaError):
    def __init__(self, message, value=None, error=None):
        super().__init__(message)
        self.value = value
        self.error = error
