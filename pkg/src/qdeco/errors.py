"""Shared exception types.

The CLI maps these onto exit codes: ValidationError -> 2, CapacityError -> 3.
"""


class ValidationError(ValueError):
    """Malformed or out-of-range input."""


class CapacityError(RuntimeError):
    """Request exceeds a documented size cap (qubit count, enumeration size)."""


class EvaluationError(ArithmeticError):
    """A numerical evaluation produced a non-finite value."""
