"""Exception hierarchy shared across the library."""


class FpsumError(Exception):
    """Base class for all library errors."""


class DomainError(FpsumError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class EvaluationError(FpsumError, ArithmeticError):
    """A numerical scheme failed to reach its target accuracy."""


class EstimationError(FpsumError, ValueError):
    """A sample is unusable for fitting (degenerate moments, too short)."""


class DataError(FpsumError, ValueError):
    """Malformed or invalid input data."""
