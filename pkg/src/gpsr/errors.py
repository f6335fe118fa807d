"""Exception types shared across the package."""


class GpsrError(Exception):
    """Base class for all package-specific errors."""


class DomainError(GpsrError):
    """An operator was applied to an input outside its domain (strict mode)."""


class ParseError(GpsrError):
    """Malformed expression text.

    Carries the character offset of the offending token in ``position``.
    """

    def __init__(self, message, position=None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


class UnknownSymbolError(ParseError):
    """A symbol in the input is not part of the active vocabulary."""


class GuardViolation(GpsrError):
    """A tractability guard was exceeded (enumeration too large, m too big, ...)."""


class TooLargeError(GuardViolation):
    """Exhaustive enumeration was requested for an intractably large class."""


class InvalidConfidenceError(GpsrError):
    """Confidence level delta outside the open interval (0, 1)."""


class InvalidBaseError(GpsrError):
    """Per-node growth base below 1; the geometric-series bound does not apply."""


class ConfigError(GpsrError):
    """Inconsistent or unparseable run configuration."""


class SchemaError(GpsrError):
    """A data file does not match the expected column schema."""


class MissingArtifactError(GpsrError):
    """A referenced run artifact (directory or file) does not exist."""
