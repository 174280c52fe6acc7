"""Exception hierarchy shared by every module."""

from __future__ import annotations


class PargiError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(PargiError, ValueError):
    """Malformed graph or permutation input."""


class Graph6Error(ParseError):
    def __init__(self, message: str, offset: int | None = None):
        self.offset = offset
        if offset is not None:
            message = f"{message} (byte offset {offset})"
        super().__init__(message)


class SelfLoopError(ParseError):
    pass


class DuplicateEdgeError(ParseError):
    pass


class VertexRangeError(ParseError):
    pass


class UnknownColorVertexError(ParseError):
    pass


class HeaderError(ParseError):
    pass


class BudgetExceededError(PargiError):
    """A construction would exceed the configured memory budget."""

    def __init__(self, what: str, size: int, budget: int):
        self.size = size
        self.budget = budget
        super().__init__(f"{what}: size {size} exceeds memory budget {budget}")


class IndexSpaceError(PargiError, ValueError):
    """Two partitions over different index sets were compared."""


class NotTransitiveError(PargiError, ValueError):
    pass


class CapExceededError(PargiError, ValueError):
    """Brute-force oracle refused an input above its size cap."""
