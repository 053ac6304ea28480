"""Exception types shared across the package."""


class SnfdistError(Exception):
    """Base class for all package errors."""


class BudgetExceeded(SnfdistError):
    """An enumeration or minor count would exceed the configured budget."""


class PrecisionFailure(SnfdistError):
    """A certified evaluation could not reach the requested tolerance."""
