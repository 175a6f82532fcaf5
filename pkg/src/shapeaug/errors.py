"""Exception types shared across the package."""


class ShapeAugError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(ShapeAugError, ValueError):
    """A configuration value or combination of values is invalid."""


class DataError(ShapeAugError, ValueError):
    """Input data violates a contract (bad coordinates, shape mismatch, ...).

    ``index`` identifies the offending element (e.g. event position in a
    stream) when one exists.
    """

    def __init__(self, message: str, *, index: int | None = None):
        super().__init__(message)
        self.index = index


class DegenerateGeometryError(ShapeAugError, ValueError):
    """A geometric construction has no valid result (e.g. collinear hull input)."""


class FormatError(ShapeAugError, ValueError):
    """A file could not be parsed.  Carries a byte offset or line number."""

    def __init__(self, message: str, *, offset: int | None = None,
                 line: int | None = None):
        if offset is not None:
            message = f"{message} (byte offset {offset})"
        if line is not None:
            message = f"{message} (line {line})"
        super().__init__(message)
        self.offset = offset
        self.line = line
