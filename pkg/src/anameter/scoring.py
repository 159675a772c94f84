"""Degree pipeline: micro-grid classification and the percentage aggregations.

A micro-grid earns an integer degree 0-3 from the number and spread of its
checked cells. Degrees aggregate upward in three steps, always excluding N/A
cells and shrinking the divisor accordingly:

  local    LA  per (aspect, factor) block: sum of micro degrees as a share of
               the block maximum, so 100% means every relevant micro-grid is 3
  aspect   AA  mean of the defined local degrees in an aspect's row
  factor   FA  mean of the defined local degrees in a factor's column
  global   GA  mean of all defined local degrees

With no N/A cells, GA equals mean(AA) and mean(FA) exactly. N/A cells can
break that identity, so GA is defined over the local matrix and a warning is
attached whenever the three quantities drift apart.

Everything here is pure over immutable inputs; scoring many evaluations in
parallel is safe.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import NoScoreError, TaxonomyMismatchError
from .gridmodel import Evaluation, GridKey, MicroGridState, Mode
from .taxonomy import Taxonomy

MAX_MICRO_DEGREE = 3

# GA, mean(AA) and mean(FA) are considered identical within this tolerance.
IDENTITY_TOLERANCE = 1e-9


# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MicroDegree:
    """Degree of one micro-grid: 0-3, or None when the grid is N/A."""

    value: int | None

    @property
    def is_na(self) -> bool:
        return self.value is None


@dataclass(frozen=True)
class LocalDegree:
    """One (aspect, factor) block of the result grid.

    percent is None (undefined) only when every relevant micro-grid is N/A,
    i.e. m == n. n and m are kept for auditability.
    """

    aspect_id: str
    factor_id: str
    percent: float | None
    n: int
    m: int
    degree_sum: float

    @property
    def is_defined(self) -> bool:
        return self.percent is not None


@dataclass(frozen=True)
class ScoreReport:
    """Full scoring of one evaluation, carrying taxonomy order for rendering."""

    taxonomy_id: str
    taxonomy_version: str
    system: str
    evaluator: str
    mode: Mode
    aspects: tuple[tuple[str, str], ...]  # (id, label) in taxonomy order
    factors: tuple[tuple[str, str], ...]
    micro: dict[GridKey, MicroDegree]
    local: dict[tuple[str, str], LocalDegree]  # keyed (aspect_id, factor_id)
    aspect_degrees: dict[str, float | None]
    factor_degrees: dict[str, float | None]
    global_percent: float
    identity_warning: str | None

    @property
    def aspect_ids(self) -> tuple[str, ...]:
        return tuple(a for a, _ in self.aspects)

    @property
    def factor_ids(self) -> tuple[str, ...]:
        return tuple(f for f, _ in self.factors)


# ---------------------------------------------------------------------------
# Micro-grid classification
# ---------------------------------------------------------------------------

def micro_degree(g: MicroGridState) -> MicroDegree:
    """Classify one micro-grid by the distribution of its checked cells.

    Rows are factor elements, columns are aspect elements:
      0  no checked boxes
      1  exactly one checked box
      2  two or more boxes confined to a single row or a single column
      3  boxes on at least two rows and at least two columns
    N/A grids classify as N/A regardless of marks (they hold none).
    """
    if g.na:
        return MicroDegree(None)
    if not g.marks:
        return MicroDegree(0)
    if len(g.marks) == 1:
        return MicroDegree(1)
    rows = {m.factor_element_id for m in g.marks}
    cols = {m.aspect_element_id for m in g.marks}
    if len(rows) >= 2 and len(cols) >= 2:
        return MicroDegree(3)
    return MicroDegree(2)


# ---------------------------------------------------------------------------
# Aggregation
# ---------------------------------------------------------------------------

def local_degree(
    aspect_id: str,
    factor_id: str,
    degrees: Iterable[float | None],
) -> LocalDegree:
    """Fold the block's micro degrees (None = N/A) into a local percentage.

    percent = sum(degrees) * 100 / ((n - m) * 3); undefined when m == n.
    """
    values = list(degrees)
    n = len(values)
    defined = [v for v in values if v is not None]
    m = n - len(defined)
    total = float(sum(defined))
    if m == n:
        return LocalDegree(aspect_id, factor_id, None, n, m, 0.0)
    percent = total * 100.0 / ((n - m) * MAX_MICRO_DEGREE)
    return LocalDegree(aspect_id, factor_id, percent, n, m, total)


def _mean_defined(values: Iterable[float | None]) -> float | None:
    defined = [v for v in values if v is not None]
    if not defined:
        return None
    return sum(defined) / len(defined)


def aspect_degree(
    local: Mapping[tuple[str, str], LocalDegree], aspect_id: str
) -> float | None:
    """Mean of the defined local degrees in the aspect's row; None if none."""
    return _mean_defined(
        ld.percent for (a, _), ld in local.items() if a == aspect_id
    )


def factor_degree(
    local: Mapping[tuple[str, str], LocalDegree], factor_id: str
) -> float | None:
    """Mean of the defined local degrees in the factor's column; None if none."""
    return _mean_defined(
        ld.percent for (_, f), ld in local.items() if f == factor_id
    )


def global_degree(local: Mapping[tuple[str, str], LocalDegree]) -> float:
    """Mean over all defined local degrees.

    Defined this way it equals both mean(AA) and mean(FA) whenever no cell is
    N/A; raises NoScoreError when every local degree is undefined.
    """
    value = _mean_defined(ld.percent for ld in local.values())
    if value is None:
        raise NoScoreError("every micro-grid is N/A; no degree can be computed")
    return value


@dataclass(frozen=True)
class Aggregation:
    """Local matrix plus the three derived degree levels."""

    local: dict[tuple[str, str], LocalDegree]
    aspect_degrees: dict[str, float | None]
    factor_degrees: dict[str, float | None]
    global_percent: float
    identity_warning: str | None


def aggregate_degrees(
    t: Taxonomy, degrees: Mapping[GridKey, float | None]
) -> Aggregation:
    """Aggregate per-micro-grid degrees (None = N/A) up to the global level.

    `degrees` must cover the full sub-aspect x sub-factor product. Degrees may
    be fractional (multi-evaluator means); single evaluations pass integers.
    """
    local: dict[tuple[str, str], LocalDegree] = {}
    for aspect in t.aspects:
        for factor in t.factors:
            block = [
                degrees[(sa.id, sf.id)]
                for sa in aspect.sub_aspects
                for sf in factor.sub_factors
            ]
            local[(aspect.id, factor.id)] = local_degree(aspect.id, factor.id, block)

    aspect_degrees = {a.id: aspect_degree(local, a.id) for a in t.aspects}
    factor_degrees = {f.id: factor_degree(local, f.id) for f in t.factors}
    global_percent = global_degree(local)

    warning = None
    mean_aa = _mean_defined(aspect_degrees.values())
    mean_fa = _mean_defined(factor_degrees.values())
    if (
        abs(mean_aa - global_percent) > IDENTITY_TOLERANCE
        or abs(mean_fa - global_percent) > IDENTITY_TOLERANCE
    ):
        warning = (
            "N/A cells left some local degrees undefined, so the aspect and "
            f"factor means diverge: GA={global_percent:.6f}, "
            f"mean(AA)={mean_aa:.6f}, mean(FA)={mean_fa:.6f}. GA is the mean "
            "over all defined local degrees."
        )
    return Aggregation(local, aspect_degrees, factor_degrees, global_percent, warning)


def micro_degrees(e: Evaluation, t: Taxonomy) -> dict[GridKey, MicroDegree]:
    """Degree of every micro-grid in the taxonomy, absent entries scoring 0."""
    return {key: micro_degree(e.grid(*key)) for key in t.micro_grid_keys()}


def score(e: Evaluation, t: Taxonomy) -> ScoreReport:
    """Compose micro -> local -> aspect/factor/global into a full report.

    Deterministic; raises NoScoreError if every micro-grid is N/A and
    TaxonomyMismatchError if e does not reference t.
    """
    if (e.taxonomy_id, e.taxonomy_version) != (t.id, t.version):
        raise TaxonomyMismatchError(
            f"evaluation references taxonomy {e.taxonomy_id!r} v{e.taxonomy_version}, "
            f"scored against {t.id!r} v{t.version}"
        )
    micro = micro_degrees(e, t)
    degrees = {key: (None if d.is_na else float(d.value)) for key, d in micro.items()}
    agg = aggregate_degrees(t, degrees)
    return ScoreReport(
        taxonomy_id=t.id,
        taxonomy_version=t.version,
        system=e.system,
        evaluator=e.evaluator,
        mode=e.mode,
        aspects=tuple((a.id, a.label) for a in t.aspects),
        factors=tuple((f.id, f.label) for f in t.factors),
        micro=micro,
        local=agg.local,
        aspect_degrees=agg.aspect_degrees,
        factor_degrees=agg.factor_degrees,
        global_percent=agg.global_percent,
        identity_warning=agg.identity_warning,
    )
