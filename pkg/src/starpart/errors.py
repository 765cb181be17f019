"""Exception hierarchy shared by every module."""

from __future__ import annotations


class StarpartError(Exception):
    """Base class for all library errors."""


class GraphParseError(StarpartError, ValueError):
    """Malformed graph6, bipartite text, code or JSON input.

    ``offset`` is the byte offset (0-based) of the offending character when it
    is known, otherwise ``None``.
    """

    def __init__(self, message: str, offset: int | None = None):
        if offset is not None:
            message = f"{message} (at byte {offset})"
        super().__init__(message)
        self.offset = offset


class ArgumentError(StarpartError, ValueError):
    """A call received arguments that violate its contract."""


class ClassMembershipError(StarpartError):
    """The input contains a forbidden pattern.

    Carries the pattern name and the witness embedding so callers (and the CLI)
    can report *why* the graph is outside the admissible class.
    """

    def __init__(self, pattern: str, witness, message: str | None = None):
        self.pattern = pattern
        self.witness = witness
        super().__init__(message or f"input contains forbidden pattern {pattern}: {witness}")

    def to_json(self) -> dict:
        return {"error": "class-membership", "pattern": self.pattern, "witness": self.witness}


class SizeLimitError(StarpartError):
    """The input is larger than the configured desk-scale limit."""


class ContractError(StarpartError):
    """An internal postcondition or a documented lemma bound failed to hold."""
