"""Exception hierarchy shared by the package."""


class SwiptError(Exception):
    """Base class for all package errors."""


class DomainError(SwiptError, ValueError):
    """An argument lies outside the domain of the operation."""


class ConvergenceError(SwiptError, ArithmeticError):
    """A numerical routine failed to reach its tolerance.

    ``estimate`` carries the best value obtained before giving up.
    """

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate


class AgreementError(SwiptError):
    """Analytic and Monte Carlo values disagree beyond the allowed gate."""

    def __init__(self, message, row=None):
        super().__init__(message)
        self.row = row
