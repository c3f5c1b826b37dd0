"""
Custom exceptions for tomography operations.
"""

from typing import Optional


class TomographyError(Exception):
    """Base exception for tomography errors."""
    pass


class DimensionMismatchError(TomographyError, ValueError):
    """Operands live in different dimensions."""
    pass


class UnsupportedDimensionError(TomographyError, ValueError):
    """Requested dimension is not supported by a construction (e.g. non-prime MUB)."""
    pass


class NumericalFailureError(TomographyError, ArithmeticError):
    """An eigensolver or linear solve did not converge."""

    def __init__(self, message: str, dim: Optional[int] = None):
        super().__init__(message)
        self.dim = dim


class CompletenessError(TomographyError, ValueError):
    """Measurement operators are not tomographically complete (M†M singular)."""

    def __init__(self, message: str, condition_number: float = float("inf")):
        super().__init__(message)
        self.condition_number = condition_number


class NormalizationError(TomographyError, ValueError):
    """Probabilities or frequencies do not satisfy their normalization."""
    pass


class DomainError(TomographyError, ValueError):
    """A bound parameter lies outside the range the bound is stated for."""
    pass


class InvalidStateError(TomographyError, ValueError):
    """Matrix is not a valid density matrix."""
    pass


class FormatError(TomographyError, ValueError):
    """Malformed matrix or vector-set text file."""

    def __init__(self, message: str, path: Optional[str] = None, line: Optional[int] = None):
        location = ""
        if path is not None:
            location = f"{path}:{line}: " if line is not None else f"{path}: "
        super().__init__(f"{location}{message}")
        self.path = path
        self.line = line
