"""Exception hierarchy.

``DataError`` subclasses signal bad user input (CLI exit code 1). Everything
else deriving from ``OrdinalTransportError`` is an internal fault (exit 2).
"""


class OrdinalTransportError(Exception):
    """Base class for all package errors."""


class DataError(OrdinalTransportError, ValueError):
    """Input data violates a documented precondition."""


class NegativeMass(DataError):
    pass


class NotNormalized(DataError):
    pass


class DimensionMismatch(DataError):
    pass


class OutOfRange(DataError):
    pass


class InfeasibleBox(DataError):
    pass


class KTooLarge(DataError):
    pass


class NoObservations(DataError):
    pass


class ParseError(DataError):
    def __init__(self, message, row=None, column=None):
        loc = []
        if row is not None:
            loc.append(f"row {row}")
        if column is not None:
            loc.append(f"column {column!r}")
        if loc:
            message = f"{message} ({', '.join(loc)})"
        super().__init__(message)
        self.row = row
        self.column = column


class OutOfRangeCategory(ParseError):
    pass


class EmptyFile(ParseError):
    pass


class LpFailure(OrdinalTransportError, RuntimeError):
    """A linear program that must be solvable was reported infeasible or unbounded."""


class InfeasibleEndpoint(OrdinalTransportError, RuntimeError):
    pass
