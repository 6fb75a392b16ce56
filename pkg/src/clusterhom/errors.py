class ClusterError(Exception):
    """Base class for all errors raised by clusterhom."""


class SpecError(ClusterError):
    """Malformed or inconsistent input data (unknown symbols, bad degrees)."""


class BasisMismatch(SpecError):
    pass


class WindowError(ClusterError):
    """The truncation window is unusable (too large, unbounded, or not d-stable)."""


class MathFailure(ClusterError):
    """A mathematical check failed: d^2 != 0, a map is not a chain map, ..."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class ParseError(SpecError):
    def __init__(self, message, line=None, col=None):
        loc = f"line {line}, col {col}: " if line is not None else ""
        super().__init__(loc + message)
        self.line = line
        self.col = col
