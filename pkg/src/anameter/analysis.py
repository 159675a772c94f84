"""Compare two score reports; merge several evaluators' grids of one system.

Merging averages at the micro-degree level (the finest level that carries a
number) and re-aggregates, so local and semi-global sub-scores stay
meaningful. Evaluators who flagged a cell N/A are excluded from that cell's
mean; a cell is N/A in the merge only when every evaluator flagged it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import IncompatibleError
from .gridmodel import Evaluation, GridKey, Mode
from .scoring import (
    Aggregation,
    LocalDegree,
    MicroDegree,
    ScoreReport,
    aggregate_degrees,
    micro_degrees,
)
from .taxonomy import Taxonomy


# ---------------------------------------------------------------------------
# Comparison
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MicroDiff:
    """A micro-grid scored differently by the two reports (both non-N/A)."""

    sub_aspect_id: str
    sub_factor_id: str
    left: int
    right: int


@dataclass(frozen=True)
class NaDisagreement:
    sub_aspect_id: str
    sub_factor_id: str
    left_na: bool
    right_na: bool


@dataclass(frozen=True)
class ComparisonReport:
    """Pairwise diff of two reports; every delta is right minus left.

    Deltas are None wherever either side is undefined, so the structure is
    antisymmetric under swapping left and right.
    """

    taxonomy_id: str
    taxonomy_version: str
    mode: Mode
    left_system: str
    left_evaluator: str
    right_system: str
    right_evaluator: str
    aspects: tuple[tuple[str, str], ...]
    factors: tuple[tuple[str, str], ...]
    la_delta: dict[tuple[str, str], float | None]
    aa_delta: dict[str, float | None]
    fa_delta: dict[str, float | None]
    ga_delta: float
    micro_diffs: tuple[MicroDiff, ...]
    na_disagreements: tuple[NaDisagreement, ...]

    @property
    def left_label(self) -> str:
        return f"{self.left_system} ({self.left_evaluator})"

    @property
    def right_label(self) -> str:
        return f"{self.right_system} ({self.right_evaluator})"

    @property
    def is_identical(self) -> bool:
        if self.micro_diffs or self.na_disagreements:
            return False
        deltas = [self.ga_delta, *self.la_delta.values(),
                  *self.aa_delta.values(), *self.fa_delta.values()]
        return all(d is None or d == 0.0 for d in deltas)


def _delta(left: float | None, right: float | None) -> float | None:
    if left is None or right is None:
        return None
    return right - left


def compare(a: ScoreReport, b: ScoreReport) -> ComparisonReport:
    """Diff two reports over the same taxonomy and mode (systems may differ)."""
    if (a.taxonomy_id, a.taxonomy_version) != (b.taxonomy_id, b.taxonomy_version):
        raise IncompatibleError(
            f"taxonomy mismatch: {a.taxonomy_id!r} v{a.taxonomy_version} vs "
            f"{b.taxonomy_id!r} v{b.taxonomy_version}"
        )
    if a.mode != b.mode:
        raise IncompatibleError(f"mode mismatch: {a.mode.value} vs {b.mode.value}")

    micro_diffs = []
    na_disagreements = []
    for key in a.micro:  # both reports cover the identical key set
        left, right = a.micro[key], b.micro[key]
        if left.is_na != right.is_na:
            na_disagreements.append(NaDisagreement(key[0], key[1], left.is_na, right.is_na))
        elif not left.is_na and left.value != right.value:
            micro_diffs.append(MicroDiff(key[0], key[1], left.value, right.value))

    return ComparisonReport(
        taxonomy_id=a.taxonomy_id,
        taxonomy_version=a.taxonomy_version,
        mode=a.mode,
        left_system=a.system,
        left_evaluator=a.evaluator,
        right_system=b.system,
        right_evaluator=b.evaluator,
        aspects=a.aspects,
        factors=a.factors,
        la_delta={
            key: _delta(a.local[key].percent, b.local[key].percent) for key in a.local
        },
        aa_delta={
            aid: _delta(a.aspect_degrees[aid], b.aspect_degrees[aid])
            for aid in a.aspect_degrees
        },
        fa_delta={
            fid: _delta(a.factor_degrees[fid], b.factor_degrees[fid])
            for fid in a.factor_degrees
        },
        ga_delta=b.global_percent - a.global_percent,
        micro_diffs=tuple(micro_diffs),
        na_disagreements=tuple(na_disagreements),
    )


# ---------------------------------------------------------------------------
# Multi-evaluator merge
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MergedEvaluation:
    """Mean-combined result of several evaluators scoring one system."""

    taxonomy_id: str
    taxonomy_version: str
    system: str
    mode: Mode
    evaluators: tuple[str, ...]
    aspects: tuple[tuple[str, str], ...]
    factors: tuple[tuple[str, str], ...]
    mean_degrees: dict[GridKey, float | None]  # None = N/A for every evaluator
    local: dict[tuple[str, str], LocalDegree]
    aspect_degrees: dict[str, float | None]
    factor_degrees: dict[str, float | None]
    global_percent: float
    identity_warning: str | None


def merge(evals: Sequence[Evaluation], t: Taxonomy) -> MergedEvaluation:
    """Average the evaluators' micro degrees cell by cell and re-aggregate.

    All evaluations must target the same taxonomy, system and mode, under
    distinct evaluator names. Mean degrees are real-valued; the 0-3
    classification is not re-applied after averaging.
    """
    if not evals:
        raise IncompatibleError("nothing to merge: evaluation list is empty")
    head = evals[0]
    for e in evals:
        if (e.taxonomy_id, e.taxonomy_version) != (t.id, t.version):
            raise IncompatibleError(
                f"evaluation targets taxonomy {e.taxonomy_id!r} v{e.taxonomy_version}, "
                f"expected {t.id!r} v{t.version}"
            )
        if e.system != head.system:
            raise IncompatibleError(f"system mismatch: {head.system!r} vs {e.system!r}")
        if e.mode != head.mode:
            raise IncompatibleError(f"mode mismatch: {head.mode.value} vs {e.mode.value}")
    names = [e.evaluator for e in evals]
    if len(set(names)) != len(names):
        dupes = sorted({n for n in names if names.count(n) > 1})
        raise IncompatibleError(f"duplicate evaluator names: {', '.join(dupes)}")

    per_eval: list[dict[GridKey, MicroDegree]] = [micro_degrees(e, t) for e in evals]
    mean_degrees: dict[GridKey, float | None] = {}
    for key in t.micro_grid_keys():
        values = [m[key].value for m in per_eval if not m[key].is_na]
        mean_degrees[key] = sum(values) / len(values) if values else None

    agg: Aggregation = aggregate_degrees(t, mean_degrees)
    return MergedEvaluation(
        taxonomy_id=t.id,
        taxonomy_version=t.version,
        system=head.system,
        mode=head.mode,
        evaluators=tuple(names),
        aspects=tuple((a.id, a.label) for a in t.aspects),
        factors=tuple((f.id, f.label) for f in t.factors),
        mean_degrees=mean_degrees,
        local=agg.local,
        aspect_degrees=agg.aspect_degrees,
        factor_degrees=agg.factor_degrees,
        global_percent=agg.global_percent,
        identity_warning=agg.identity_warning,
    )
