"""
Exception hierarchy for the refinement engine.

Every error raised on purpose by the package derives from ``GlaeserError``
so callers (the CLI in particular) can map them to exit codes.
"""

from typing import Any, Optional


class GlaeserError(Exception):
    """Base exception for the package."""

    def __init__(self, message: str, location: Optional[Any] = None):
        self.message = message
        self.location = location
        super().__init__(self.message)


class EmptyRegion(GlaeserError):
    """Raised when an operation needs a nonempty convex region."""
    pass


class DimMismatch(GlaeserError, ValueError):
    """Raised when regions of different fiber dimension are combined."""
    pass


class BadScenario(GlaeserError):
    """Raised when a scenario system cannot produce well-formed fibers."""
    pass


class IndexOutOfRange(GlaeserError, IndexError):
    """Raised for node indices outside a grid."""
    pass


class TooLarge(GlaeserError):
    """Raised when a brute-force oracle is asked to run on a large grid."""
    pass


class EmptyFiber(GlaeserError):
    """Raised when a selection is requested from a bundle with an empty fiber."""
    pass


class DomainError(GlaeserError, ValueError):
    """Raised when an analytic formula is evaluated outside its domain."""
    pass


class NotStabilized(GlaeserError):
    """Raised on request when refinement hit max_iterations without stabilizing."""
    pass
