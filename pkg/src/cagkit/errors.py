"""Exception hierarchy shared by the engine, service, and CLI.

Every error carries a stable machine-readable ``code`` so the HTTP layer
can map engine failures to API error bodies without string matching.
"""

from __future__ import annotations

from typing import Any


class CagkitError(Exception):
    """Base class for all engine errors."""

    code = "INTERNAL"

    def __init__(self, message: str, details: dict[str, Any] | None = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}


class ValidationFailed(CagkitError):
    """A record violated one or more statement invariants."""

    code = "VALIDATION_FAILED"

    def __init__(self, errors: list[str], message: str = "validation failed"):
        super().__init__(message, {"errors": errors})
        self.errors = errors


class FileMissing(CagkitError):
    code = "FILE_NOT_FOUND"


class InvalidQuery(CagkitError):
    code = "INVALID_QUERY"


class EmptyQuery(CagkitError):
    code = "EMPTY_QUERY"


class UnknownModel(CagkitError):
    code = "UNKNOWN_MODEL"


class UnknownNode(CagkitError):
    code = "UNKNOWN_NODE"


class UnknownEdge(CagkitError):
    code = "UNKNOWN_EDGE"


class UnknownStatement(CagkitError):
    code = "UNKNOWN_STATEMENT"


class SelfLoop(CagkitError):
    code = "SELF_LOOP"


class SelfImport(CagkitError):
    code = "SELF_IMPORT"


class WouldCreateCycle(CagkitError):
    """Raised when an edge insertion would close a directed cycle.

    ``details["cycle"]`` carries the full concept path of the would-be cycle.
    """

    code = "WOULD_CREATE_CYCLE"

    def __init__(self, cycle: list[str]):
        super().__init__(
            "edge would create cycle: " + " -> ".join(cycle), {"cycle": cycle}
        )
        self.cycle = cycle


class VersionConflict(CagkitError):
    code = "VERSION_CONFLICT"

    def __init__(self, expected: int, actual: int):
        super().__init__(
            f"model version is {actual}, mutation expected {expected}",
            {"expected": expected, "actual": actual},
        )


class MismatchedStatement(CagkitError):
    code = "MISMATCHED_STATEMENT"


class NoPathFound(CagkitError):
    """No directed path exists within the hop bound: a knowledge gap."""

    code = "NO_PATH_FOUND"


class DimensionMismatch(CagkitError):
    code = "DIMENSION_MISMATCH"


class EmptyEmbeddingFile(CagkitError):
    code = "EMPTY_EMBEDDING_FILE"


class DegenerateBoxes(CagkitError):
    code = "DEGENERATE_BOXES"


class StoreUnavailable(CagkitError):
    code = "STORE_UNAVAILABLE"
