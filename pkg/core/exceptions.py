"""
Exception hierarchy shared by every harmspace app.

Each exception carries the process exit code the management commands use
when they translate it into a ``CommandError``.
"""


class HarmspaceError(Exception):
    """Base class for all pipeline errors."""
    exit_code = 3


class ConfigError(HarmspaceError):
    """The run configuration is invalid or inconsistent."""
    exit_code = 2


class DataError(HarmspaceError):
    """Input data is missing, unreadable or unsuitable for the operation."""
    exit_code = 3


class InvalidArgumentError(HarmspaceError, ValueError):
    """An operation received an argument outside its domain."""
    exit_code = 3


class InvalidConditionError(InvalidArgumentError):
    """The operating condition yields a window too coarse for analysis."""


class EmptyExtractionError(DataError):
    """The signal is shorter than a single analysis window."""


class InvalidSplitError(DataError):
    """A train/test split would leave one side empty or leak test data."""


class IllConditionedDesignError(DataError):
    """
    The condition monomial matrix is rank deficient.

    ``monomials`` names the columns that could not be resolved, in the
    order the pivoted factorisation rejected them.
    """

    def __init__(self, message, monomials=()):
        super().__init__(message)
        self.monomials = tuple(monomials)
