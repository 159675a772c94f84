"""HTTP JSON API the web UI drives: taxonomies, evaluations, live scores.

Files in the data directory remain the system of record; the server keeps an
in-memory index with one revision counter per evaluation. Writes to one
evaluation are mutually exclusive and guarded by optimistic concurrency
(client sends the revision it saw; a stale revision gets 409). The full score
report is recomputed and returned on every accepted patch; at this grid size
that is far cheaper than any incremental bookkeeping.
"""

from __future__ import annotations

import logging
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Literal, Optional

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from . import analysis, gridmodel, render, scoring, taxonomy
from .cli import TAXONOMY_FILE_SUFFIX, evaluation_filename
from .errors import (
    AnameterError,
    IncompatibleError,
    NoScoreError,
    NotApplicableError,
    UnknownIdError,
)

log = logging.getLogger("anameter.server")


# ---------------------------------------------------------------------------
# Request bodies
# ---------------------------------------------------------------------------

class CreateEvaluationRequest(BaseModel):
    system: str
    evaluator: str
    mode: str
    taxonomy_id: Optional[str] = None
    taxonomy_version: Optional[str] = None


class GridChange(BaseModel):
    kind: Literal["mark", "na"]
    sub_aspect: str
    sub_factor: str
    aspect_element: Optional[str] = None
    factor_element: Optional[str] = None
    checked: Optional[bool] = None
    na: Optional[bool] = None


class PatchRequest(BaseModel):
    revision: int
    changes: list[GridChange] = []


class CompareRequest(BaseModel):
    left: str
    right: str


class MergeRequest(BaseModel):
    ids: list[str]


# ---------------------------------------------------------------------------
# Store
# ---------------------------------------------------------------------------

@dataclass
class VersionedEvaluation:
    """An evaluation plus its optimistic-concurrency revision counter.

    The revision increments by exactly 1 per accepted (non-empty) mutation;
    it lives in server memory, the file on disk stays the system of record.
    """

    evaluation: gridmodel.Evaluation
    revision: int
    path: Path
    lock: threading.Lock


class EvaluationStore:
    """Evaluations on disk plus in-memory revisions and per-entry write locks."""

    def __init__(self, data_dir: Path, registry: dict[tuple[str, str], taxonomy.Taxonomy]):
        self.data_dir = data_dir
        self.registry = registry
        self._entries: dict[str, VersionedEvaluation] = {}
        self._registry_lock = threading.Lock()
        self._load_existing()

    def _load_existing(self) -> None:
        if not self.data_dir.is_dir():
            return
        for path in sorted(self.data_dir.glob("*.json")):
            if path.name.endswith(TAXONOMY_FILE_SUFFIX):
                continue
            try:
                e = gridmodel.load_evaluation(path.read_bytes(), self.registry.values())
            except AnameterError as exc:
                log.warning("skipping %s: %s", path.name, exc)
                continue
            self._entries[path.stem] = VersionedEvaluation(e, 0, path, threading.Lock())

    def taxonomy_for(self, e: gridmodel.Evaluation) -> taxonomy.Taxonomy:
        return self.registry[(e.taxonomy_id, e.taxonomy_version)]

    def ids(self) -> list[str]:
        with self._registry_lock:
            return sorted(self._entries)

    def get(self, evaluation_id: str) -> VersionedEvaluation | None:
        with self._registry_lock:
            return self._entries.get(evaluation_id)

    def create(self, e: gridmodel.Evaluation) -> tuple[str, VersionedEvaluation] | None:
        """Register and persist a new evaluation; None if the id is taken."""
        evaluation_id = evaluation_filename(e.system, e.evaluator, e.mode)[: -len(".json")]
        with self._registry_lock:
            if evaluation_id in self._entries:
                return None
            entry = VersionedEvaluation(e, 0, self.data_dir / f"{evaluation_id}.json", threading.Lock())
            self._entries[evaluation_id] = entry
        self._persist(entry)
        return evaluation_id, entry

    def _persist(self, entry: VersionedEvaluation) -> None:
        tmp = entry.path.with_suffix(".json.tmp")
        tmp.write_bytes(gridmodel.save_evaluation(entry.evaluation))
        tmp.replace(entry.path)

    def apply_patch(self, entry: VersionedEvaluation, patch: PatchRequest) -> tuple[str, object]:
        """Apply a patch atomically. Returns ("ok", evaluation) on success,
        ("stale", current_revision) on revision mismatch, or
        ("invalid", (index, message)) when a change breaks an invariant."""
        t = self.taxonomy_for(entry.evaluation)
        with entry.lock:
            if patch.revision != entry.revision:
                return "stale", entry.revision
            if not patch.changes:
                return "ok", entry.evaluation  # no-op: revision unchanged
            e = entry.evaluation
            for i, change in enumerate(patch.changes):
                try:
                    e = _apply_change(e, t, change)
                except (UnknownIdError, NotApplicableError, ValueError) as exc:
                    return "invalid", (i, str(exc))
            entry.evaluation = e
            entry.revision += 1
            self._persist(entry)
            return "ok", e


def _apply_change(
    e: gridmodel.Evaluation, t: taxonomy.Taxonomy, change: GridChange
) -> gridmodel.Evaluation:
    if change.kind == "mark":
        if change.aspect_element is None or change.factor_element is None or change.checked is None:
            raise ValueError("mark change needs aspect_element, factor_element and checked")
        return gridmodel.set_mark(
            e, t, change.sub_aspect, change.sub_factor,
            change.aspect_element, change.factor_element, change.checked,
        )
    if change.na is None:
        raise ValueError("na change needs the na flag")
    return gridmodel.set_na(e, t, change.sub_aspect, change.sub_factor, change.na).evaluation


# ---------------------------------------------------------------------------
# App
# ---------------------------------------------------------------------------

def _error(status: int, code: str, message: str, path: str) -> JSONResponse:
    return JSONResponse(
        status_code=status,
        content={"code": code, "message": message, "path": path},
    )


def _entry_payload(store: EvaluationStore, evaluation_id: str, entry: VersionedEvaluation) -> dict:
    e, revision = entry.evaluation, entry.revision
    t = store.taxonomy_for(e)
    try:
        report = render.score_report_to_dict(scoring.score(e, t))
    except NoScoreError:
        report = None  # every micro-grid N/A: evaluation exists, degrees do not
    return {
        "id": evaluation_id,
        "revision": revision,
        "evaluation": gridmodel.evaluation_to_dict(e),
        "report": report,
    }


def create_app(
    data_dir: Path,
    *,
    taxonomies: dict[tuple[str, str], taxonomy.Taxonomy] | None = None,
    ui_dir: Path | None = None,
) -> FastAPI:
    """Build the API app over a data directory.

    `taxonomies` defaults to the bundled taxonomy plus any *.taxonomy.json
    files found in the data directory; `ui_dir`, when given, is served at /.
    """
    from .cli import load_registry

    data_dir = Path(data_dir)
    registry = dict(taxonomies) if taxonomies is not None else load_registry(data_dir)
    store = EvaluationStore(data_dir, registry)

    app = FastAPI(title="anameter", version="0.1.0")
    app.state.store = store

    @app.exception_handler(RequestValidationError)
    async def on_invalid_request(request: Request, exc: RequestValidationError):
        return _error(422, "invalid_request", str(exc.errors()[:3]), request.url.path)

    @app.get("/api/taxonomies")
    def list_taxonomies():
        return {
            "taxonomies": [
                {
                    "id": t.id,
                    "version": t.version,
                    "factors": len(t.factors),
                    "sub_factors": len(t.sub_factors()),
                    "aspects": len(t.aspects),
                    "sub_aspects": len(t.sub_aspects()),
                }
                for _, t in sorted(store.registry.items())
            ]
        }

    @app.get("/api/taxonomies/{taxonomy_id}")
    def get_taxonomy(taxonomy_id: str):
        matches = [t for (tid, _), t in sorted(store.registry.items()) if tid == taxonomy_id]
        if not matches:
            return _error(404, "not_found", f"unknown taxonomy {taxonomy_id!r}",
                          f"/api/taxonomies/{taxonomy_id}")
        return taxonomy.taxonomy_to_dict(matches[-1])

    @app.get("/api/evaluations")
    def list_evaluations():
        items = []
        for evaluation_id in store.ids():
            entry = store.get(evaluation_id)
            if entry is None:
                continue
            e = entry.evaluation
            items.append({
                "id": evaluation_id,
                "system": e.system,
                "evaluator": e.evaluator,
                "mode": e.mode.value,
                "taxonomy": {"id": e.taxonomy_id, "version": e.taxonomy_version},
                "revision": entry.revision,
                "updated": gridmodel.evaluation_to_dict(e)["updated"],
            })
        return {"evaluations": items}

    @app.post("/api/evaluations", status_code=201)
    def create_evaluation(body: CreateEvaluationRequest, request: Request):
        try:
            mode = gridmodel.Mode(body.mode)
        except ValueError:
            return _error(422, "invalid_request",
                          f"mode must be one of {[m.value for m in gridmodel.Mode]}",
                          request.url.path)
        tid = body.taxonomy_id or taxonomy.default_taxonomy().id
        candidates = [t for (i, _), t in sorted(store.registry.items()) if i == tid]
        if body.taxonomy_version is not None:
            candidates = [t for t in candidates if t.version == body.taxonomy_version]
        if not candidates:
            return _error(422, "incompatible", f"unknown taxonomy {tid!r}", request.url.path)
        e = gridmodel.new_evaluation(candidates[-1], body.system, body.evaluator, mode)
        created = store.create(e)
        if created is None:
            return _error(409, "already_exists",
                          "an evaluation for this system/evaluator/mode already exists",
                          request.url.path)
        evaluation_id, entry = created
        return _entry_payload(store, evaluation_id, entry)

    @app.get("/api/evaluations/{evaluation_id}")
    def get_evaluation(evaluation_id: str):
        entry = store.get(evaluation_id)
        if entry is None:
            return _error(404, "not_found", f"unknown evaluation {evaluation_id!r}",
                          f"/api/evaluations/{evaluation_id}")
        with entry.lock:  # consistent snapshot
            return _entry_payload(store, evaluation_id, entry)

    @app.patch("/api/evaluations/{evaluation_id}/marks")
    def patch_marks(evaluation_id: str, body: PatchRequest):
        path = f"/api/evaluations/{evaluation_id}/marks"
        entry = store.get(evaluation_id)
        if entry is None:
            return _error(404, "not_found", f"unknown evaluation {evaluation_id!r}", path)
        status, detail = store.apply_patch(entry, body)
        if status == "stale":
            return _error(409, "stale_revision",
                          f"expected revision {detail}, got {body.revision}", path)
        if status == "invalid":
            index, message = detail
            return _error(422, "invariant_violation", message, f"{path}/changes/{index}")
        return _entry_payload(store, evaluation_id, entry)

    @app.post("/api/compare")
    def post_compare(body: CompareRequest, request: Request):
        entries = []
        for eval_id in (body.left, body.right):
            entry = store.get(eval_id)
            if entry is None:
                return _error(404, "not_found", f"unknown evaluation {eval_id!r}",
                              request.url.path)
            entries.append(entry)
        try:
            reports = [
                scoring.score(entry.evaluation, store.taxonomy_for(entry.evaluation))
                for entry in entries
            ]
            comparison = analysis.compare(reports[0], reports[1])
        except (IncompatibleError, NoScoreError) as exc:
            return _error(422, "incompatible", str(exc), request.url.path)
        return render.comparison_to_dict(comparison)

    @app.post("/api/merge")
    def post_merge(body: MergeRequest, request: Request):
        evals = []
        for eval_id in body.ids:
            entry = store.get(eval_id)
            if entry is None:
                return _error(404, "not_found", f"unknown evaluation {eval_id!r}",
                              request.url.path)
            evals.append(entry.evaluation)
        if not evals:
            return _error(422, "incompatible", "nothing to merge: ids is empty",
                          request.url.path)
        try:
            merged = analysis.merge(evals, store.taxonomy_for(evals[0]))
        except (IncompatibleError, NoScoreError) as exc:
            return _error(422, "incompatible", str(exc), request.url.path)
        return render.merged_to_dict(merged)

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
