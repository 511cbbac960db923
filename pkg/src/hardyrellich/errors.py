"""Exception hierarchy shared by all modules."""


class HardyRellichError(Exception):
    """Base class for errors raised by this package."""


class WindowError(HardyRellichError, LookupError):
    """A lazy function was evaluated outside its declared window."""

    def __init__(self, vertex, name=None):
        self.vertex = vertex
        label = f" {name!r}" if name else ""
        super().__init__(f"function{label} evaluated outside its window at vertex {vertex!r}")


class DomainError(HardyRellichError, ValueError):
    """An input violates the mathematical domain of an operation."""


class PositivityError(DomainError):
    """A value required to be (strictly) positive was not."""

    def __init__(self, message, vertex=None, value=None):
        self.vertex = vertex
        self.value = value
        if vertex is not None:
            message = f"{message} at vertex {vertex!r} (value {value!r})"
        super().__init__(message)


class AssemblyError(HardyRellichError, RuntimeError):
    """An internal consistency check failed (signals a bug, not bad input)."""


class ConfigError(HardyRellichError, ValueError):
    """Invalid run configuration."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
