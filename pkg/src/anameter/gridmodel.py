"""One evaluator's filled characterization grid for one system in one mode.

Evaluations are value-semantic: every operation returns a new Evaluation and
never touches the input. Storage is sparse; a (sub-aspect, sub-factor) pair
with no entry means "all unchecked, not N/A", which keeps files small for the
common mostly-empty grid.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from enum import Enum
from typing import Iterable, NamedTuple

from .errors import (
    NotApplicableError,
    ParseError,
    TaxonomyMismatchError,
    UnknownIdError,
    ValidationError,
    Violation,
)
from .taxonomy import SubAspect, SubFactor, Taxonomy, registry_from

GridKey = tuple[str, str]  # (sub_aspect_id, sub_factor_id)


class Mode(str, Enum):
    """Who initiates the adaptation: the user (adaptability) or the system."""

    ADAPTABILITY = "adaptability"
    ADAPTIVITY = "adaptivity"


@dataclass(frozen=True, order=True)
class CellMark:
    """One checked cell: this aspect element adapts to this factor element.

    Presence in a micro-grid's mark set is what "checked" means; unchecked
    cells are simply absent (only checked marks are ever stored).
    """

    aspect_element_id: str
    factor_element_id: str


_EMPTY_MARKS: frozenset[CellMark] = frozenset()


@dataclass(frozen=True)
class MicroGridState:
    """Element-level boolean matrix for one (sub-aspect, sub-factor) pair."""

    sub_aspect_id: str
    sub_factor_id: str
    na: bool = False
    marks: frozenset[CellMark] = _EMPTY_MARKS

    @property
    def is_empty(self) -> bool:
        return not self.na and not self.marks


@dataclass(frozen=True)
class Evaluation:
    taxonomy_id: str
    taxonomy_version: str
    system: str
    evaluator: str
    mode: Mode
    created: datetime
    updated: datetime
    micro_grids: dict[GridKey, MicroGridState]

    def grid(self, sub_aspect_id: str, sub_factor_id: str) -> MicroGridState:
        """State for one micro-grid; absent entries read as empty, not-NA."""
        key = (sub_aspect_id, sub_factor_id)
        return self.micro_grids.get(key, MicroGridState(sub_aspect_id, sub_factor_id))


class NaChange(NamedTuple):
    """Result of set_na: the new evaluation plus any marks the flag cleared."""

    evaluation: Evaluation
    cleared_marks: tuple[CellMark, ...]


def _utcnow() -> datetime:
    return datetime.now(timezone.utc)


def _resolve(t: Taxonomy, sub_aspect_id: str, sub_factor_id: str) -> tuple[SubAspect, SubFactor]:
    sa = t.find_sub_aspect(sub_aspect_id)
    if sa is None:
        raise UnknownIdError(f"unknown sub-aspect {sub_aspect_id!r}")
    sf = t.find_sub_factor(sub_factor_id)
    if sf is None:
        raise UnknownIdError(f"unknown sub-factor {sub_factor_id!r}")
    return sa, sf


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------

def new_evaluation(
    t: Taxonomy,
    system: str,
    evaluator: str,
    mode: Mode,
    *,
    now: datetime | None = None,
) -> Evaluation:
    """Fresh evaluation: semantically all-unchecked, no N/A flags."""
    stamp = now or _utcnow()
    return Evaluation(
        taxonomy_id=t.id,
        taxonomy_version=t.version,
        system=system,
        evaluator=evaluator,
        mode=Mode(mode),
        created=stamp,
        updated=stamp,
        micro_grids={},
    )


def set_mark(
    e: Evaluation,
    t: Taxonomy,
    sub_aspect_id: str,
    sub_factor_id: str,
    aspect_element_id: str,
    factor_element_id: str,
    checked: bool,
    *,
    now: datetime | None = None,
) -> Evaluation:
    """Check or uncheck one cell. No-ops return the evaluation unchanged.

    Raises UnknownIdError if any id does not resolve, NotApplicableError if
    the micro-grid is flagged N/A (the flag must be cleared first).
    """
    sa, sf = _resolve(t, sub_aspect_id, sub_factor_id)
    if not any(el.id == aspect_element_id for el in sa.elements):
        raise UnknownIdError(
            f"unknown aspect element {aspect_element_id!r} in sub-aspect {sub_aspect_id!r}"
        )
    if not any(el.id == factor_element_id for el in sf.elements):
        raise UnknownIdError(
            f"unknown factor element {factor_element_id!r} in sub-factor {sub_factor_id!r}"
        )

    key = (sub_aspect_id, sub_factor_id)
    state = e.grid(*key)
    if state.na:
        raise NotApplicableError(
            f"micro-grid ({sub_aspect_id}, {sub_factor_id}) is flagged N/A; clear it first"
        )

    mark = CellMark(aspect_element_id, factor_element_id)
    if checked == (mark in state.marks):
        return e

    marks = state.marks | {mark} if checked else state.marks - {mark}
    grids = dict(e.micro_grids)
    if marks:
        grids[key] = replace(state, marks=marks)
    else:
        grids.pop(key, None)
    return replace(e, micro_grids=grids, updated=now or _utcnow())


def set_na(
    e: Evaluation,
    t: Taxonomy,
    sub_aspect_id: str,
    sub_factor_id: str,
    na: bool,
    *,
    now: datetime | None = None,
) -> NaChange:
    """Set or clear the N/A flag; setting it clears (and reports) any marks."""
    _resolve(t, sub_aspect_id, sub_factor_id)
    key = (sub_aspect_id, sub_factor_id)
    state = e.grid(*key)
    if state.na == na:
        return NaChange(e, ())

    cleared = tuple(sorted(state.marks))
    grids = dict(e.micro_grids)
    if na:
        grids[key] = MicroGridState(sub_aspect_id, sub_factor_id, na=True)
    else:
        grids.pop(key, None)
    return NaChange(replace(e, micro_grids=grids, updated=now or _utcnow()), cleared)


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

def dangling_ids(e: Evaluation, t: Taxonomy) -> tuple[str, ...]:
    """Every id in the evaluation that the taxonomy does not define."""
    missing: list[str] = []
    for (sa_id, sf_id), state in e.micro_grids.items():
        sa = t.find_sub_aspect(sa_id)
        sf = t.find_sub_factor(sf_id)
        if sa is None:
            missing.append(sa_id)
        if sf is None:
            missing.append(sf_id)
        aspect_ids = {el.id for el in sa.elements} if sa else set()
        factor_ids = {el.id for el in sf.elements} if sf else set()
        for mark in sorted(state.marks):
            if sa is not None and mark.aspect_element_id not in aspect_ids:
                missing.append(mark.aspect_element_id)
            if sf is not None and mark.factor_element_id not in factor_ids:
                missing.append(mark.factor_element_id)
    return tuple(dict.fromkeys(missing))  # de-dup, keep first-seen order


def validate_evaluation(e: Evaluation, t: Taxonomy) -> list[Violation]:
    """Empty list iff the evaluation satisfies every invariant against t."""
    violations: list[Violation] = []
    if (e.taxonomy_id, e.taxonomy_version) != (t.id, t.version):
        violations.append(Violation(
            "/taxonomy",
            f"references {e.taxonomy_id!r} v{e.taxonomy_version}, "
            f"validated against {t.id!r} v{t.version}",
        ))
    for mid in dangling_ids(e, t):
        violations.append(Violation("/micro_grids", f"identifier {mid!r} not in taxonomy"))
    for (sa_id, sf_id), state in e.micro_grids.items():
        path = f"/micro_grids/({sa_id},{sf_id})"
        if (state.sub_aspect_id, state.sub_factor_id) != (sa_id, sf_id):
            violations.append(Violation(path, "key does not match micro-grid state ids"))
        if state.na and state.marks:
            violations.append(Violation(path, "micro-grid is N/A but holds marks"))
        if state.is_empty:
            violations.append(Violation(path, "empty micro-grid stored explicitly"))
    return violations


# ---------------------------------------------------------------------------
# Persistence (canonical JSON; equal evaluations serialize byte-identically)
# ---------------------------------------------------------------------------

_TS_FORMAT = "%Y-%m-%dT%H:%M:%S.%f"


def _format_ts(dt: datetime) -> str:
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc).strftime(_TS_FORMAT) + "Z"


def _parse_ts(raw: str, path: str) -> datetime:
    text = raw[:-1] + "+00:00" if raw.endswith("Z") else raw
    try:
        dt = datetime.fromisoformat(text)
    except ValueError as exc:
        raise ParseError(f"{path}: invalid timestamp {raw!r}") from exc
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc)


def evaluation_to_dict(e: Evaluation) -> dict:
    grids = []
    for key in sorted(e.micro_grids):
        state = e.micro_grids[key]
        grids.append({
            "sub_aspect": state.sub_aspect_id,
            "sub_factor": state.sub_factor_id,
            "na": state.na,
            "marks": [
                {"aspect_element": m.aspect_element_id, "factor_element": m.factor_element_id}
                for m in sorted(state.marks)
            ],
        })
    return {
        "taxonomy": {"id": e.taxonomy_id, "version": e.taxonomy_version},
        "system": e.system,
        "evaluator": e.evaluator,
        "mode": e.mode.value,
        "created": _format_ts(e.created),
        "updated": _format_ts(e.updated),
        "micro_grids": grids,
    }


def save_evaluation(e: Evaluation) -> bytes:
    text = json.dumps(evaluation_to_dict(e), indent=2, ensure_ascii=False)
    return (text + "\n").encode("utf-8")


def load_evaluation(source, taxonomies: Taxonomy | Iterable[Taxonomy]) -> Evaluation:
    """Parse an evaluation document and bind it to its taxonomy.

    `taxonomies` may be a single Taxonomy or any iterable of them; the
    document's (id, version) reference picks the match. Raises ParseError,
    TaxonomyMismatchError (unknown taxonomy or dangling ids, all listed) or
    ValidationError (invariant violations such as N/A with marks).
    """
    if hasattr(source, "read"):
        source = source.read()
    if isinstance(source, bytes):
        source = source.decode("utf-8")
    try:
        doc = json.loads(source)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ParseError("/: expected object")

    required = ("taxonomy", "system", "evaluator", "mode", "created", "updated", "micro_grids")
    unknown = sorted(set(doc) - set(required))
    if unknown:
        raise ParseError(f"/: unknown keys {unknown}")
    missing = [k for k in required if k not in doc]
    if missing:
        raise ParseError(f"/: missing keys {missing}")

    ref = doc["taxonomy"]
    if not isinstance(ref, dict) or sorted(ref) != ["id", "version"]:
        raise ParseError("/taxonomy: expected object with keys ['id', 'version']")
    for field in ("system", "evaluator", "created", "updated"):
        if not isinstance(doc[field], str):
            raise ParseError(f"/{field}: expected string")
    try:
        mode = Mode(doc["mode"])
    except ValueError:
        raise ParseError(f"/mode: expected 'adaptability' or 'adaptivity', got {doc['mode']!r}")
    if not isinstance(doc["micro_grids"], list):
        raise ParseError("/micro_grids: expected array")

    registry = registry_from(taxonomies)
    key = (str(ref["id"]), str(ref["version"]))
    taxonomy = registry.get(key)
    if taxonomy is None:
        known = ", ".join(f"{i} v{v}" for i, v in sorted(registry)) or "none"
        raise TaxonomyMismatchError(
            f"unknown taxonomy {key[0]!r} v{key[1]} (known: {known})"
        )

    grids: dict[GridKey, MicroGridState] = {}
    violations: list[Violation] = []
    for i, item in enumerate(doc["micro_grids"]):
        path = f"/micro_grids/{i}"
        if not isinstance(item, dict):
            raise ParseError(f"{path}: expected object")
        unknown = sorted(set(item) - {"sub_aspect", "sub_factor", "na", "marks"})
        if unknown:
            raise ParseError(f"{path}: unknown keys {unknown}")
        try:
            sa_id, sf_id = str(item["sub_aspect"]), str(item["sub_factor"])
            na = item["na"]
            raw_marks = item["marks"]
        except KeyError as exc:
            raise ParseError(f"{path}: missing key {exc.args[0]!r}")
        if not isinstance(na, bool):
            raise ParseError(f"{path}/na: expected boolean")
        if not isinstance(raw_marks, list):
            raise ParseError(f"{path}/marks: expected array")
        marks = set()
        for j, raw in enumerate(raw_marks):
            if not isinstance(raw, dict) or sorted(raw) != ["aspect_element", "factor_element"]:
                raise ParseError(
                    f"{path}/marks/{j}: expected object with keys ['aspect_element', 'factor_element']"
                )
            marks.add(CellMark(str(raw["aspect_element"]), str(raw["factor_element"])))
        gkey = (sa_id, sf_id)
        if gkey in grids:
            violations.append(Violation(path, f"duplicate micro-grid entry ({sa_id}, {sf_id})"))
            continue
        state = MicroGridState(sa_id, sf_id, na=na, marks=frozenset(marks))
        if state.is_empty:
            continue  # normalize: explicit empty entries read back as absent
        grids[gkey] = state

    evaluation = Evaluation(
        taxonomy_id=key[0],
        taxonomy_version=key[1],
        system=doc["system"],
        evaluator=doc["evaluator"],
        mode=mode,
        created=_parse_ts(doc["created"], "/created"),
        updated=_parse_ts(doc["updated"], "/updated"),
        micro_grids=grids,
    )

    missing_ids = dangling_ids(evaluation, taxonomy)
    if missing_ids:
        raise TaxonomyMismatchError(
            "evaluation references identifiers missing from taxonomy "
            f"{taxonomy.id!r} v{taxonomy.version}: {', '.join(missing_ids)}",
            dangling_ids=missing_ids,
        )
    violations.extend(
        v for v in validate_evaluation(evaluation, taxonomy)
        if "not in taxonomy" not in v.message
    )
    if violations:
        raise ValidationError(violations)
    return evaluation
