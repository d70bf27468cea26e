"""Exception types shared across the package."""


class DataError(ValueError):
    """Raised for problems with input files or their contents (CSV, schema)."""


class NumericalError(ArithmeticError):
    """Raised when an optimization produces non-finite parameters."""
