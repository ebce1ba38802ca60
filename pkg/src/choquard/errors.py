"""Exception types shared across the package."""


class ChoquardError(Exception):
    """Base class for all package errors."""


class GridMismatchError(ChoquardError):
    """Two fields (or a field and an operator) live on different grids."""


class ZeroFieldError(ChoquardError):
    """An operation that requires a nonzero field received (numerically) zero."""


class DomainError(ChoquardError, ValueError):
    """A parameter lies outside its admissible range."""


class NoRootsError(ChoquardError):
    """The fibering equation has no roots at the requested parameter value."""


class NonConvergenceError(ChoquardError):
    """An iterative solve exhausted its iteration budget.

    Carries the best iterate found so it can be inspected or reported.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class ConfigError(ChoquardError, ValueError):
    """A run configuration failed validation."""
