"""
Domain exceptions.

Raised by entities and domain services when a business rule is violated.
Infrastructure failures use the error types declared next to each port in
``src.core.interfaces``.
"""


class ImplyLPError(Exception):
    """
    Base exception for all domain errors.

    Keeps an optional underlying cause, like the port errors do.
    """

    def __init__(self, message: str, cause: Exception | None = None):
        """
        Initialize a domain error.

        Args:
            message: Human-readable error description
            cause: Optional underlying exception that caused this error
        """
        super().__init__(message)
        self.cause = cause


class ShapeError(ImplyLPError, ValueError):
    """Input or layer shapes do not line up."""


class CompatibilityError(ImplyLPError, ValueError):
    """Two networks differ in input or output dimension."""


class ClassIndexError(ImplyLPError, ValueError):
    """A class index is out of range or a class pair is degenerate."""


class NumericError(ImplyLPError, ValueError):
    """A value that must be finite is NaN or infinite."""


class RegionError(ImplyLPError, ValueError):
    """The input region is empty or malformed."""


class ConfigurationError(ImplyLPError, ValueError):
    """A run configuration is invalid."""
