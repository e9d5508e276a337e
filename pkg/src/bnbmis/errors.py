"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of an operation."""


class ParseError(ValueError):
    """Malformed graph or CSV input."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ResourceCapError(RuntimeError):
    """A search exceeded its configured node or frontier budget."""

    def __init__(self, message, nodes=0):
        super().__init__(message)
        self.nodes = nodes


class InsufficientDataError(ValueError):
    """Not enough usable samples to fit or compare."""
