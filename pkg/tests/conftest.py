"""Shared fixtures, independent oracles and grid builders for the test suite."""

from __future__ import annotations

import itertools

import pytest

import anameter as am
from anameter.gridmodel import CellMark, MicroGridState


# ---------------------------------------------------------------------------
# Independent oracles (kept deliberately different from the implementation)
# ---------------------------------------------------------------------------

def oracle_micro_degree(cells: set[tuple[int, int]]) -> int:
    """Brute-force micro-grid classifier over (row, col) coordinates.

    0/1 by count; 2 iff >=2 cells fit entirely inside some single row or some
    single column (checked by explicit enumeration); 3 otherwise.
    """
    if not cells:
        return 0
    if len(cells) == 1:
        return 1
    rows = {r for r, _ in cells}
    cols = {c for _, c in cells}
    for r in rows:
        if all(cr == r for cr, _ in cells):
            return 2
    for c in cols:
        if all(cc == c for _, cc in cells):
            return 2
    return 3


def oracle_local_percent(degrees: list[float | None]) -> float | None:
    """Direct arithmetic for a block: sum * 100 / ((n - m) * 3)."""
    n = len(degrees)
    na = [d for d in degrees if d is None]
    m = len(na)
    if m == n:
        return None
    return sum(d for d in degrees if d is not None) * 100.0 / ((n - m) * 3)


def oracle_mean(values: list[float]) -> float:
    return sum(values) / len(values)


# ---------------------------------------------------------------------------
# Grid builders
# ---------------------------------------------------------------------------

def grid_state(
    cells: set[tuple[int, int]],
    *,
    na: bool = False,
    sub_aspect: str = "sa",
    sub_factor: str = "sf",
) -> MicroGridState:
    """MicroGridState from (row, col) coordinates; row=factor, col=aspect."""
    marks = frozenset(CellMark(f"a{c}", f"f{r}") for r, c in cells)
    return MicroGridState(sub_aspect, sub_factor, na=na, marks=marks)


def all_grids(rows: int, cols: int):
    """Every possible micro-grid of the given size, as coordinate sets."""
    coords = list(itertools.product(range(rows), range(cols)))
    for bits in range(1 << len(coords)):
        yield {coords[i] for i in range(len(coords)) if bits >> i & 1}


def make_taxonomy(
    factor_shapes: list[list[int]],
    aspect_shapes: list[list[int]],
    *,
    taxonomy_id: str = "toy",
    version: str = "1",
) -> am.Taxonomy:
    """Small taxonomy from shape lists: one int per sub-node = element count."""
    counter = itertools.count()

    def elements(n: int) -> tuple[am.Element, ...]:
        return tuple(
            am.Element(id=f"el-{next(counter)}", label=f"Element {next(counter)}")
            for _ in range(n)
        )

    factors = tuple(
        am.Factor(
            id=f"factor-{fi}",
            label=f"Factor {fi}",
            sub_factors=tuple(
                am.SubFactor(f"sf-{fi}-{si}", f"Sub-factor {fi}.{si}", elements(n))
                for si, n in enumerate(shape)
            ),
        )
        for fi, shape in enumerate(factor_shapes)
    )
    aspects = tuple(
        am.Aspect(
            id=f"aspect-{ai}",
            label=f"Aspect {ai}",
            sub_aspects=tuple(
                am.SubAspect(f"sa-{ai}-{si}", f"Sub-aspect {ai}.{si}", elements(n))
                for si, n in enumerate(shape)
            ),
        )
        for ai, shape in enumerate(aspect_shapes)
    )
    return am.Taxonomy(id=taxonomy_id, version=version, factors=factors, aspects=aspects)


def set_degree(
    e: am.Evaluation,
    t: am.Taxonomy,
    sub_aspect_id: str,
    sub_factor_id: str,
    degree: int,
) -> am.Evaluation:
    """Mark a micro-grid so it classifies to the requested degree (0-3)."""
    sa = t.find_sub_aspect(sub_aspect_id)
    sf = t.find_sub_factor(sub_factor_id)
    a = [el.id for el in sa.elements]
    f = [el.id for el in sf.elements]
    if degree == 0:
        pattern = []
    elif degree == 1:
        pattern = [(a[0], f[0])]
    elif degree == 2:
        pattern = [(a[0], f[0]), (a[1], f[0])]   # one row, two columns
    else:
        pattern = [(a[0], f[0]), (a[1], f[1])]   # two rows, two columns
    for aspect_el, factor_el in pattern:
        e = am.set_mark(e, t, sub_aspect_id, sub_factor_id, aspect_el, factor_el, True)
    return e


# ---------------------------------------------------------------------------
# The published worked example, rebuilt from per-block degree sums
# ---------------------------------------------------------------------------

# (aspect, factor) -> sum of the block's 8 micro degrees. Each block is
# 2 sub-aspects x 4 sub-factors, so LA = sum * 100 / 24: these sums reproduce
# the published local matrix (33.33, 37.5, 25, ... row by row).
REFERENCE_BLOCK_SUMS: dict[tuple[str, str], int] = {
    ("presentation", "user"): 8,
    ("control", "user"): 9,
    ("abstraction", "user"): 6,
    ("presentation", "platform"): 8,
    ("control", "platform"): 8,
    ("abstraction", "platform"): 4,
    ("presentation", "environment"): 2,
    ("control", "environment"): 1,
    ("abstraction", "environment"): 0,
    ("presentation", "activity"): 2,
    ("control", "activity"): 8,
    ("abstraction", "activity"): 9,
}


def degrees_for_sum(total: int) -> list[int]:
    """Decompose a block sum into micro degrees, each 0-3."""
    threes, rest = divmod(total, 3)
    return [3] * threes + ([rest] if rest else [])


def build_reference_evaluation(
    t: am.Taxonomy,
    *,
    system: str = "worked-example",
    evaluator: str = "eva",
    mode: am.Mode = am.Mode.ADAPTABILITY,
) -> am.Evaluation:
    """Evaluation over the default taxonomy reproducing the published matrix."""
    e = am.new_evaluation(t, system, evaluator, mode)
    for (aspect_id, factor_id), total in REFERENCE_BLOCK_SUMS.items():
        aspect = next(a for a in t.aspects if a.id == aspect_id)
        factor = next(f for f in t.factors if f.id == factor_id)
        slots = [(sa.id, sf.id) for sa in aspect.sub_aspects for sf in factor.sub_factors]
        degrees = degrees_for_sum(total)
        assert len(degrees) <= len(slots)
        for (sa_id, sf_id), degree in zip(slots, degrees):
            e = set_degree(e, t, sa_id, sf_id, degree)
    return e


def reference_la_matrix() -> dict[tuple[str, str], float]:
    """Expected local matrix, by the arithmetic oracle (sum * 100 / 24)."""
    return {key: total * 100.0 / 24 for key, total in REFERENCE_BLOCK_SUMS.items()}


# ---------------------------------------------------------------------------
# Fixtures
# ---------------------------------------------------------------------------

@pytest.fixture(scope="session")
def default_tax() -> am.Taxonomy:
    return am.default_taxonomy()


@pytest.fixture(scope="session")
def reference_eval(default_tax) -> am.Evaluation:
    return build_reference_evaluation(default_tax)


@pytest.fixture()
def minimal_doc() -> dict:
    return {
        "id": "mini",
        "version": "1",
        "factors": [
            {"id": "f", "label": "F", "sub_factors": [
                {"id": "sf", "label": "SF", "elements": [{"id": "fe", "label": "FE"}]},
            ]},
        ],
        "aspects": [
            {"id": "a", "label": "A", "sub_aspects": [
                {"id": "sa", "label": "SA", "elements": [{"id": "ae", "label": "AE"}]},
            ]},
        ],
    }
