"""Exception types raised across the package."""


class ChartError(Exception):
    """Base class for every error raised by this package."""


class InvalidParameterError(ChartError, ValueError):
    """A distribution or estimator argument lies outside its domain."""


class InvalidPriorError(ChartError, ValueError):
    """A prior specification cannot be elicited (e.g. mean of the prior undefined)."""


class NoConvergenceError(ChartError, RuntimeError):
    """An iterative inversion failed to converge."""


class QuadratureError(ChartError, RuntimeError):
    """Adaptive quadrature did not reach the requested tolerance."""


class ProtocolError(ChartError, RuntimeError):
    """Chart driven out of order: wrong period, early freeze, mismatched streams."""


class DataError(ChartError, ValueError):
    """Malformed dataset file; carries the offending row and column when known.

    ``kind`` is one of ``"parse"``, ``"width"``, ``"nonpositive"`` or ``"format"``.
    """

    def __init__(self, message, row=None, column=None, kind="format"):
        where = []
        if row is not None:
            where.append(f"row {row}")
        if column is not None:
            where.append(f"column {column}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)
        self.row = row
        self.column = column
        self.kind = kind


class ConfigError(ChartError, ValueError):
    """Missing, unknown or invalid configuration key."""

    def __init__(self, message, key=None):
        if key is not None:
            message = f"{key}: {message}"
        super().__init__(message)
        self.key = key
