"""Exception types shared across the toolkit."""


class BudgetExceededError(Exception):
    """A configured resource budget (tuple count, table count) was exceeded.

    Raised instead of silently truncating or guessing; callers map this to a
    dedicated exit code so "ran out of budget" is never confused with "no".
    """


class AlgebraFormatError(ValueError):
    """Malformed algebra or digraph text, with a 1-based source position."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None and column is not None:
            message = f"line {line}, column {column}: {message}"
        elif line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class TermError(ValueError):
    """A term does not fit the ambient algebra.

    Covers unknown operation symbols, child-count/arity mismatches, and
    argument elements outside the universe.
    """


class ConsistencyError(RuntimeError):
    """An internal invariant that should be unbreakable was violated."""
