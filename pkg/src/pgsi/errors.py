"""Exception types shared across the package."""

from __future__ import annotations


class ParseError(ValueError):
    """Raised for malformed game or solution documents.

    Carries the 1-based line and column of the offending token so that
    command line users get a position they can jump to.
    """

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class PolicyContractError(RuntimeError):
    """An improvement or expansion policy returned something illegal."""


class SolverInvariantError(RuntimeError):
    """An internal solver invariant failed; indicates a bug, not bad input."""
