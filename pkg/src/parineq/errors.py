"""Exception types raised across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class DataError(ValueError):
    """Input data failed validation (bad cells, too few rows, missing column)."""


class BudgetExceededError(RuntimeError):
    """Exact enumeration would need more kernel evaluations than allowed."""


class ConvergenceError(RuntimeError):
    """An iterative solver did not converge.

    The iterate trace is kept on ``trace`` for diagnosis.
    """

    def __init__(self, message, trace=()):
        super().__init__(message)
        self.trace = list(trace)
