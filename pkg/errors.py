# errors.py
# Exception hierarchy shared by every module. The CLI maps exit_code to the
# process exit status: 2 for bad input, 3 for computations that cannot proceed.

from typing import Optional


class EvidentError(Exception):
    """Base class for all domain errors."""
    exit_code: int = 1


class InputError(EvidentError):
    """Malformed or inconsistent input data."""
    exit_code = 2


class ComputationError(EvidentError):
    """Valid input on which the computation is undefined."""
    exit_code = 3


# ----------------
# Input errors
# ----------------
class ParseError(InputError):
    """A file could not be read or does not follow its schema."""

    def __init__(self, source: str, message: str, line: Optional[int] = None):
        self.source = source
        self.line = line
        where = f"{source}:{line}" if line is not None else source
        super().__init__(f"{where}: {message}")


class InvalidInterval(InputError):
    pass


class InvalidScale(InputError):
    pass


class UnknownTerm(InputError):
    pass


class DuplicateResponse(InputError):
    pass


class EmptyGroup(InputError):
    pass


class InvalidEvidence(InputError):
    pass


class InvalidWeights(InputError):
    pass


class IncompleteGrid(InputError):
    pass


class WeightMismatch(InputError):
    pass


class MissingDocument(InputError):
    pass


class DuplicateDocId(InputError):
    pass


class InvalidInput(InputError):
    pass


# ----------------
# Computation errors
# ----------------
class TotalConflict(ComputationError):
    """Dempster combination is undefined because the sources never agree."""

    def __init__(
        self,
        left_source: str,
        right_source: str,
        conflict: float,
        key: Optional[str] = None,
    ):
        self.left_source = left_source
        self.right_source = right_source
        self.conflict = conflict
        self.key = key
        prefix = f"{key}: " if key else ""
        super().__init__(
            f"{prefix}total conflict between '{left_source}' and '{right_source}' "
            f"(K={conflict:.6f})"
        )

    def with_key(self, key: str) -> "TotalConflict":
        return TotalConflict(self.left_source, self.right_source, self.conflict, key=key)


class NoMarkerMatches(ComputationError):
    pass


class ZeroTotal(ComputationError):
    pass


class EmptyInput(ComputationError):
    pass


class DomainError(ComputationError):
    pass


class DegreeTooHigh(ComputationError):
    pass
