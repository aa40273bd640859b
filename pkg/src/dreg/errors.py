"""Exception hierarchy shared by every layer of the package."""

from __future__ import annotations


class DregError(Exception):
    """Base class for all errors raised by this package."""


class UsageError(DregError, ValueError):
    """Malformed input: mismatched variable counts, bad indices, bad options."""


class ParseError(UsageError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class ResourceError(DregError):
    """A Gröbner computation exceeded its budget.

    ``diagnostics`` records how far the computation got.
    """

    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


class NoRationalPoint(DregError):
    """No rational point could be found on a component within budget."""


class LineInPolarLocus(DregError):
    """The chosen line lies inside the polar locus of a connection matrix."""


class NotFiniteRank(DregError):
    """The module is not of finite rank over the rational function field."""


class CyclicVectorNotFound(DregError):
    pass
