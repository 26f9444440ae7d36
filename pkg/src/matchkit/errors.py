"""Exception types shared across matchkit.

Every error carries a short machine-readable ``code`` so the CLI can map
it to an exit status and JSON payload.
"""

from __future__ import annotations


class MatchkitError(Exception):
    code = "ERROR"

    def __init__(self, message: str, **details):
        super().__init__(message)
        self.details = details

    def to_dict(self) -> dict:
        return {"code": self.code, "message": str(self), "details": self.details}


class StructuralError(MatchkitError):
    """Inputs live in different groups/spaces or are malformed."""

    code = "STRUCTURAL"


class PreconditionError(MatchkitError):
    code = "PRECONDITION"


class CapExceededError(MatchkitError):
    """An exhaustive routine was asked to run beyond its configured cap."""

    code = "CAP_EXCEEDED"


class CoveringBoundError(PreconditionError):
    """More subspaces than field elements: the union may cover the space."""

    code = "COVERING_BOUND"


class Theorem2BoundError(PreconditionError):
    """Family larger than the base field; the n - s dimension count can fail."""

    code = "THEOREM2_BOUND"


class InternalTheoremViolation(MatchkitError):
    """A search that a theorem guarantees to succeed came back empty.

    This is a bug sentinel, never an expected outcome.
    """

    code = "INTERNAL_THEOREM_VIOLATION"
