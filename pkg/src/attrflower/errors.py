"""Exception types shared across the package."""


class AttrFlowerError(Exception):
    """Base class for all library-specific errors."""


class ArgumentError(AttrFlowerError, ValueError):
    """An argument violates a documented precondition."""


class ParseError(AttrFlowerError):
    """Input could not be parsed at all (malformed JSON, truncated bytes)."""


class SchemaError(AttrFlowerError):
    """Parsed input violates the manifest or vector schema."""


class IoError(AttrFlowerError):
    """A referenced file is missing or unreadable."""


class DegenerateInput(AttrFlowerError):
    """Numerical input is degenerate beyond repair, e.g. points that remain
    indistinguishable after jitter."""
