"""The two-sided hierarchy that gives every characterization grid its shape.

One side descends factors -> sub-factors -> elements (what the system adapts
to), the other aspects -> sub-aspects -> elements (what about the system is
adapted). Crossing every sub-aspect with every sub-factor yields the
micro-grids an evaluator fills in.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import IO, Iterable, Union

from .errors import ParseError, ValidationError, Violation

Source = Union[bytes, str, IO[bytes], IO[str]]

DEFAULT_TAXONOMY_RESOURCE = "default_taxonomy.json"


# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Element:
    """Finest grain of description; the rows and columns inside a micro-grid."""

    id: str
    label: str
    description: str | None = None
    example_ref: str | None = None


@dataclass(frozen=True)
class SubFactor:
    id: str
    label: str
    elements: tuple[Element, ...]


@dataclass(frozen=True)
class Factor:
    id: str
    label: str
    sub_factors: tuple[SubFactor, ...]


@dataclass(frozen=True)
class SubAspect:
    id: str
    label: str
    elements: tuple[Element, ...]


@dataclass(frozen=True)
class Aspect:
    id: str
    label: str
    sub_aspects: tuple[SubAspect, ...]


@dataclass(frozen=True)
class Taxonomy:
    """Immutable after load; safe to share across concurrent readers."""

    id: str
    version: str
    factors: tuple[Factor, ...]
    aspects: tuple[Aspect, ...]

    # -- lookups (the grids are small; recomputing beats caching machinery) --

    def sub_factors(self) -> tuple[SubFactor, ...]:
        return tuple(sf for f in self.factors for sf in f.sub_factors)

    def sub_aspects(self) -> tuple[SubAspect, ...]:
        return tuple(sa for a in self.aspects for sa in a.sub_aspects)

    def find_sub_factor(self, sub_factor_id: str) -> SubFactor | None:
        for factor in self.factors:
            for sf in factor.sub_factors:
                if sf.id == sub_factor_id:
                    return sf
        return None

    def find_sub_aspect(self, sub_aspect_id: str) -> SubAspect | None:
        for aspect in self.aspects:
            for sa in aspect.sub_aspects:
                if sa.id == sub_aspect_id:
                    return sa
        return None

    def factor_of(self, sub_factor_id: str) -> Factor | None:
        for factor in self.factors:
            if any(sf.id == sub_factor_id for sf in factor.sub_factors):
                return factor
        return None

    def aspect_of(self, sub_aspect_id: str) -> Aspect | None:
        for aspect in self.aspects:
            if any(sa.id == sub_aspect_id for sa in aspect.sub_aspects):
                return aspect
        return None

    def micro_grid_keys(self) -> tuple[tuple[str, str], ...]:
        """All (sub_aspect_id, sub_factor_id) pairs, in taxonomy order."""
        return tuple(
            (sa.id, sf.id) for sa in self.sub_aspects() for sf in self.sub_factors()
        )


# ---------------------------------------------------------------------------
# Parsing (strict: wrong types and unknown keys are rejected with a path)
# ---------------------------------------------------------------------------

def _read_source(source: Source) -> str:
    if hasattr(source, "read"):
        data = source.read()
    else:
        data = source
    if isinstance(data, bytes):
        try:
            return data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"document is not valid UTF-8: {exc}") from exc
    return data


def _check_keys(obj: dict, path: str, required: tuple[str, ...],
                optional: tuple[str, ...] = ()) -> None:
    unknown = sorted(set(obj) - set(required) - set(optional))
    if unknown:
        raise ParseError(f"{path}: unknown keys {unknown}")
    missing = [k for k in required if k not in obj]
    if missing:
        raise ParseError(f"{path}: missing keys {missing}")


def _str_at(obj: dict, key: str, path: str) -> str:
    value = obj[key]
    if not isinstance(value, str):
        raise ParseError(f"{path}/{key}: expected string, got {type(value).__name__}")
    return value


def _opt_str_at(obj: dict, key: str, path: str) -> str | None:
    if key not in obj or obj[key] is None:
        return None
    return _str_at(obj, key, path)


def _list_at(obj: dict, key: str, path: str) -> list:
    value = obj[key]
    if not isinstance(value, list):
        raise ParseError(f"{path}/{key}: expected array, got {type(value).__name__}")
    return value


def _obj_item(value, path: str) -> dict:
    if not isinstance(value, dict):
        raise ParseError(f"{path}: expected object, got {type(value).__name__}")
    return value


def _parse_element(value, path: str) -> Element:
    obj = _obj_item(value, path)
    _check_keys(obj, path, ("id", "label"), ("description", "example_ref"))
    return Element(
        id=_str_at(obj, "id", path),
        label=_str_at(obj, "label", path),
        description=_opt_str_at(obj, "description", path),
        example_ref=_opt_str_at(obj, "example_ref", path),
    )


def _parse_elements(obj: dict, path: str) -> tuple[Element, ...]:
    return tuple(
        _parse_element(item, f"{path}/elements/{i}")
        for i, item in enumerate(_list_at(obj, "elements", path))
    )


def _parse_sub_factor(value, path: str) -> SubFactor:
    obj = _obj_item(value, path)
    _check_keys(obj, path, ("id", "label", "elements"))
    return SubFactor(
        id=_str_at(obj, "id", path),
        label=_str_at(obj, "label", path),
        elements=_parse_elements(obj, path),
    )


def _parse_factor(value, path: str) -> Factor:
    obj = _obj_item(value, path)
    _check_keys(obj, path, ("id", "label", "sub_factors"))
    return Factor(
        id=_str_at(obj, "id", path),
        label=_str_at(obj, "label", path),
        sub_factors=tuple(
            _parse_sub_factor(item, f"{path}/sub_factors/{i}")
            for i, item in enumerate(_list_at(obj, "sub_factors", path))
        ),
    )


def _parse_sub_aspect(value, path: str) -> SubAspect:
    obj = _obj_item(value, path)
    _check_keys(obj, path, ("id", "label", "elements"))
    return SubAspect(
        id=_str_at(obj, "id", path),
        label=_str_at(obj, "label", path),
        elements=_parse_elements(obj, path),
    )


def _parse_aspect(value, path: str) -> Aspect:
    obj = _obj_item(value, path)
    _check_keys(obj, path, ("id", "label", "sub_aspects"))
    return Aspect(
        id=_str_at(obj, "id", path),
        label=_str_at(obj, "label", path),
        sub_aspects=tuple(
            _parse_sub_aspect(item, f"{path}/sub_aspects/{i}")
            for i, item in enumerate(_list_at(obj, "sub_aspects", path))
        ),
    )


def load_taxonomy(source: Source) -> Taxonomy:
    """Parse and validate a taxonomy document; ordering is preserved.

    Raises ParseError for malformed documents and ValidationError when the
    parsed taxonomy breaks an invariant (duplicate ids, empty element lists).
    """
    text = _read_source(source)
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc
    obj = _obj_item(doc, "/")
    _check_keys(obj, "/", ("id", "version", "factors", "aspects"))
    taxonomy = Taxonomy(
        id=_str_at(obj, "id", "/"),
        version=_str_at(obj, "version", "/"),
        factors=tuple(
            _parse_factor(item, f"/factors/{i}")
            for i, item in enumerate(_list_at(obj, "factors", "/"))
        ),
        aspects=tuple(
            _parse_aspect(item, f"/aspects/{i}")
            for i, item in enumerate(_list_at(obj, "aspects", "/"))
        ),
    )
    violations = validate_taxonomy(taxonomy)
    if violations:
        raise ValidationError(violations)
    return taxonomy


# ---------------------------------------------------------------------------
# Serialization (canonical: fixed key order, 2-space indent, trailing newline)
# ---------------------------------------------------------------------------

def _element_doc(e: Element) -> dict:
    doc: dict = {"id": e.id, "label": e.label}
    if e.description is not None:
        doc["description"] = e.description
    if e.example_ref is not None:
        doc["example_ref"] = e.example_ref
    return doc


def taxonomy_to_dict(t: Taxonomy) -> dict:
    return {
        "id": t.id,
        "version": t.version,
        "factors": [
            {
                "id": f.id,
                "label": f.label,
                "sub_factors": [
                    {
                        "id": sf.id,
                        "label": sf.label,
                        "elements": [_element_doc(e) for e in sf.elements],
                    }
                    for sf in f.sub_factors
                ],
            }
            for f in t.factors
        ],
        "aspects": [
            {
                "id": a.id,
                "label": a.label,
                "sub_aspects": [
                    {
                        "id": sa.id,
                        "label": sa.label,
                        "elements": [_element_doc(e) for e in sa.elements],
                    }
                    for sa in a.sub_aspects
                ],
            }
            for a in t.aspects
        ],
    }


def save_taxonomy(t: Taxonomy) -> bytes:
    text = json.dumps(taxonomy_to_dict(t), indent=2, ensure_ascii=False)
    return (text + "\n").encode("utf-8")


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

def validate_taxonomy(t: Taxonomy) -> list[Violation]:
    """Empty list iff all taxonomy invariants hold.

    Identifiers live in a single namespace: a factor may not reuse an aspect's
    id, and no two elements anywhere may collide.
    """
    violations: list[Violation] = []
    seen: dict[str, str] = {}

    def check_id(node_id: str, path: str) -> None:
        if not node_id:
            violations.append(Violation(path, "identifier is empty"))
            return
        if node_id in seen:
            violations.append(
                Violation(path, f"duplicate identifier {node_id!r} (first used at {seen[node_id]})")
            )
        else:
            seen[node_id] = path

    if not t.factors:
        violations.append(Violation("/factors", "taxonomy needs at least one factor"))
    if not t.aspects:
        violations.append(Violation("/aspects", "taxonomy needs at least one aspect"))

    for fi, factor in enumerate(t.factors):
        fpath = f"/factors/{fi}"
        check_id(factor.id, f"{fpath}/id")
        if not factor.sub_factors:
            violations.append(Violation(fpath, f"factor {factor.id!r} has no sub-factors"))
        for si, sf in enumerate(factor.sub_factors):
            spath = f"{fpath}/sub_factors/{si}"
            check_id(sf.id, f"{spath}/id")
            if not sf.elements:
                violations.append(Violation(spath, f"sub-factor {sf.id!r} has no elements"))
            for ei, element in enumerate(sf.elements):
                check_id(element.id, f"{spath}/elements/{ei}/id")

    for ai, aspect in enumerate(t.aspects):
        apath = f"/aspects/{ai}"
        check_id(aspect.id, f"{apath}/id")
        if not aspect.sub_aspects:
            violations.append(Violation(apath, f"aspect {aspect.id!r} has no sub-aspects"))
        for si, sa in enumerate(aspect.sub_aspects):
            spath = f"{apath}/sub_aspects/{si}"
            check_id(sa.id, f"{spath}/id")
            if not sa.elements:
                violations.append(Violation(spath, f"sub-aspect {sa.id!r} has no elements"))
            for ei, element in enumerate(sa.elements):
                check_id(element.id, f"{spath}/elements/{ei}/id")

    return violations


# ---------------------------------------------------------------------------
# Bundled default
# ---------------------------------------------------------------------------

@lru_cache(maxsize=1)
def default_taxonomy() -> Taxonomy:
    """The bundled v1.0 grid: 4 factors / 16 sub-factors x 3 aspects / 6 sub-aspects.

    Sub-categories whose element inventory is not public carry clearly marked
    `placeholder-` elements meant to be replaced by real ones; the document
    format keeps them fully user-definable.
    """
    data = resources.files(__package__).joinpath("data", DEFAULT_TAXONOMY_RESOURCE)
    return load_taxonomy(data.read_bytes())


def registry_from(taxonomies: Taxonomy | Iterable[Taxonomy]) -> dict[tuple[str, str], Taxonomy]:
    """Index taxonomies by (id, version) for evaluation loading."""
    if isinstance(taxonomies, Taxonomy):
        taxonomies = (taxonomies,)
    return {(t.id, t.version): t for t in taxonomies}
