"""Exception types raised across the package."""


class CogbeamError(Exception):
    """Base class for all package errors."""


class InvalidInputError(CogbeamError, ValueError):
    """An argument violates an operation's precondition."""


class NotPSDError(InvalidInputError):
    """A matrix expected to be positive semi-definite has a negative eigenvalue."""


class ConfigError(CogbeamError, ValueError):
    """A configuration value is missing, malformed or inconsistent.

    Attributes:
        key: name of the offending configuration key, if known.
    """

    def __init__(self, message, key=None):
        super().__init__(message)
        self.key = key


class NoExactSolutionError(CogbeamError):
    """A linear system that should be consistent is not.

    Attributes:
        residual: Frobenius norm of the best least-squares residual.
    """

    def __init__(self, message, residual):
        super().__init__(message)
        self.residual = residual


class UndefinedBoundError(CogbeamError):
    """The leakage bound is undefined (the PR terminal never transmits)."""
