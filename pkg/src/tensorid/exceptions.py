"""Exception types raised by tensorid."""


class TensorIDError(Exception):
    """Base class for all tensorid errors."""

    code = "error"


class InvalidArgumentError(TensorIDError, ValueError):
    code = "invalid-argument"


class ResourceLimitError(TensorIDError, MemoryError):
    """Raised when an operation would materialize more entries than allowed."""

    code = "resource-limit"


class ParseError(TensorIDError, ValueError):
    code = "parse-error"

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class FormatError(TensorIDError, ValueError):
    code = "format-error"
