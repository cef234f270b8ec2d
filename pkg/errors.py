"""
Exception types raised by the toolkit.

All of them derive from ValueError so callers that only care about
"bad input" can keep catching that.
"""


class RcppError(ValueError):
    """Base class for toolkit errors."""


class RangeError(RcppError):
    """An index, count or rate parameter lies outside its admissible range."""


class ShapeError(RcppError):
    """A vector length is not a power of two or does not match its partner."""


class CapacityError(RcppError):
    """More items were requested than the structure can hold."""


class InvalidShorteningError(RcppError):
    """A C1 table whose punctured bits cannot be fixed by freezing source bits."""


class UndefinedDistanceError(RcppError):
    """A spectrum distance was requested for an empty spectrum."""


class ConsistencyError(RcppError):
    """Two inputs that must describe the same object disagree."""


class UsageError(RcppError):
    """Bad command-line usage."""
