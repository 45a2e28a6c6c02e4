"""Exception types shared across the package."""


class TreeFormatError(ValueError):
    """Raised for malformed tree, strings or sets input.

    ``line`` is the 1-based input line the problem was found on, when known.
    """

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class QueryError(ValueError):
    """Raised when a query violates its preconditions (bad ids, ancestry, ranges)."""
