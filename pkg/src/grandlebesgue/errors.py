"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the range where an operation is defined."""


class DataError(ValueError):
    """Function data is unusable (non-finite values where none are allowed)."""
