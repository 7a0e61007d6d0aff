"""Exception types shared across the library."""

__all__ = ["ArgumentError", "DegenerateInputError", "NearBreakdownError"]


class ArgumentError(ValueError):
    """Raised when a caller-supplied argument is invalid (shape, range, name)."""


class DegenerateInputError(ValueError):
    """Raised when an input is degenerate for the requested operation.

    Examples: a rank-deficient basis where full rank is required, a zero
    matrix passed to a condition-number estimate, a singular oracle system.
    """


class NearBreakdownError(RuntimeError):
    """Raised when a pivot of the pair gram matrix falls below tolerance.

    The offending pivot magnitude is carried in :attr:`pivot`.
    """

    def __init__(self, message: str, pivot: float):
        super().__init__(message)
        self.pivot = float(pivot)
