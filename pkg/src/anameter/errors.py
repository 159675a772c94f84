"""Exception types and the violation record shared across the package."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Violation:
    """One broken invariant: where it is and what is wrong."""

    path: str
    message: str

    def __str__(self) -> str:
        return f"{self.path}: {self.message}"


class AnameterError(Exception):
    """Base class for all package errors."""


class ParseError(AnameterError):
    """Document is not well-formed: bad JSON, wrong types, or unknown keys."""


class ValidationError(AnameterError):
    """A document parsed but violates one or more invariants."""

    def __init__(self, violations: list[Violation]):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))


class TaxonomyMismatchError(AnameterError):
    """An evaluation references a taxonomy or identifiers that do not resolve."""

    def __init__(self, message: str, dangling_ids: tuple[str, ...] = ()):
        self.dangling_ids = tuple(dangling_ids)
        super().__init__(message)


class UnknownIdError(AnameterError):
    """An operation named an identifier the taxonomy does not define."""


class NotApplicableError(AnameterError):
    """A mark was set on a micro-grid flagged N/A; clear N/A first."""


class IncompatibleError(AnameterError):
    """Reports or evaluations cannot be combined (taxonomy/system/mode mismatch)."""


class NoScoreError(AnameterError):
    """Every micro-grid is N/A, so no global degree exists."""
