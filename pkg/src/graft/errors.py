"""Exception types shared across the package."""


class GraftError(ValueError):
    """Raised on any contract violation: bad inputs, malformed files, failed solves."""


class GraphFormatError(GraftError):
    """Graph text-format error, carrying the offending line number when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
