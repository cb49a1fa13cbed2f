"""HTTP service over the engine.

Endpoints:
  POST /beads                  create and persist a bead draft
  GET  /beads?id=...           fetch one bead (integrity-rechecked on read)
  GET  /beads/context          causal context, JSON or deterministic text
  GET  /patients               patient root summaries
  GET  /patients/{id}/beads    one patient's full subgraph plus edges
  GET  /health                 object count and index status

Errors use one JSON envelope: {"status", "code", "message"}. The ``role``
query parameter is trusted as given; this prototype does authorization
filtering, not authentication.
"""

from __future__ import annotations

import os
from pathlib import Path

from fastapi import Body, FastAPI, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, PlainTextResponse
from fastapi.staticfiles import StaticFiles

from .beads import ROLE_VALUES, Bead, is_bead_id
from .engine import Engine, resolve_data_dir
from .errors import (
    IntegrityViolationError,
    InvalidDraftError,
    MissingParentError,
    NotFoundError,
)
from .traversal import serialize_context

UI_DIR_ENV = "MEDBEADS_UI_DIR"
UI_ORIGIN_ENV = "MEDBEADS_UI_ORIGIN"


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str):
        self.status = status
        self.code = code
        self.message = message
        super().__init__(message)


def _error_response(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"status": status, "code": code, "message": message})


def _parse_depth(raw: str | None, default: int) -> int:
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError:
        raise ApiError(400, "bad_depth", f"depth must be an integer, got {raw!r}")


def _check_role(role: str | None) -> str | None:
    if role is not None and role not in ROLE_VALUES:
        raise ApiError(400, "bad_role", f"unknown role {role!r}")
    return role


def create_app(data_dir: str | Path | None = None, engine: Engine | None = None) -> FastAPI:
    app = FastAPI(title="medbeads", version="0.1.0")
    eng = engine or Engine(resolve_data_dir(str(data_dir) if data_dir else None))
    app.state.engine = eng

    app.add_middleware(
        CORSMiddleware,
        allow_origins=[os.environ.get(UI_ORIGIN_ENV, "*")],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(ApiError)
    async def handle_api_error(request: Request, exc: ApiError):
        return _error_response(exc.status, exc.code, exc.message)

    @app.exception_handler(RequestValidationError)
    async def handle_validation_error(request: Request, exc: RequestValidationError):
        return _error_response(400, "bad_request", str(exc.errors()))

    @app.exception_handler(NotFoundError)
    async def handle_not_found(request: Request, exc: NotFoundError):
        return _error_response(404, "not_found", str(exc))

    @app.exception_handler(IntegrityViolationError)
    async def handle_tampered(request: Request, exc: IntegrityViolationError):
        return _error_response(500, "tampered", str(exc))

    @app.post("/beads")
    def post_bead(payload: dict = Body(...)):
        draft_dict = dict(payload)
        draft_dict.pop("id", None)  # ids are derived, never trusted from input
        draft = Bead.from_dict(draft_dict)
        try:
            bead_id, created = eng.put_bead(draft)
        except InvalidDraftError as exc:
            details = "; ".join(f"{i.code}: {i.message}" for i in exc.issues)
            raise ApiError(400, "invalid_draft", details)
        except MissingParentError as exc:
            raise ApiError(409, "missing_parent", str(exc))
        return JSONResponse(status_code=201 if created else 200, content={"id": bead_id})

    @app.get("/beads/context")
    def get_bead_context(
        id: str = Query(...),
        depth: str | None = Query(None),
        role: str | None = Query(None),
        format: str = Query("json"),
    ):
        depth_value = _parse_depth(depth, eng.depth_default)
        if not 1 <= depth_value <= eng.max_depth:
            raise ApiError(400, "bad_depth", f"depth must be between 1 and {eng.max_depth}")
        _check_role(role)
        if format not in ("json", "text"):
            raise ApiError(400, "bad_format", f"format must be json or text, got {format!r}")
        result = eng.context(id, depth_value, role)
        if format == "text":
            return PlainTextResponse(serialize_context(result))
        return result.to_dict()

    @app.get("/beads")
    def get_bead(id: str = Query(...)):
        if not is_bead_id(id):
            raise ApiError(400, "bad_id", f"not a bead id: {id!r}")
        return eng.get_bead(id).to_dict()

    @app.get("/patients")
    def list_patients(limit: int | None = Query(None, ge=1)):
        patients = eng.patients()
        return patients[:limit] if limit else patients

    @app.get("/patients/{patient_id}/beads")
    def patient_beads(
        patient_id: str,
        include_administrative: bool = Query(False),
        role: str | None = Query(None),
        limit: int | None = Query(None, ge=1),
    ):
        _check_role(role)
        beads, edges = eng.patient_beads(patient_id, include_administrative, role)
        if limit is not None and limit < len(beads):
            # best-effort truncation: keep the edge list consistent
            from .traversal import edges_for

            beads = beads[:limit]
            edges = edges_for(beads)
        return {
            "patient": patient_id,
            "beads": [b.to_dict() for b in beads],
            "edges": [{"child": e.child, "parent": e.parent} for e in edges],
        }

    @app.get("/health")
    def health():
        return eng.health()

    ui_dir = os.environ.get(UI_DIR_ENV)
    if ui_dir and Path(ui_dir).is_dir():
        app.mount("/ui", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
