"""Exception types shared across the package."""


class InputError(ValueError):
    """Malformed or out-of-range input (bad vertex, set not in family, ...)."""


class DomainError(ValueError):
    """A partially defined operation was applied outside its domain."""
