"""HTTP API over the session store.

Endpoints:
    POST /sessions                       create a session from a design
    GET  /sessions                       list sessions (status filter, paging)
    POST /sessions/{id}/observations     append one observation
    GET  /sessions/{id}                  session with full LR trajectory
    GET  /sessions/{id}/export.csv       observation log as CSV
"""

from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, HTTPException, Query, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from ..engine import DesignError, TrialDesign, TrialStatus
from .schemas import (
    DesignIn,
    ObservationIn,
    SessionDetailOut,
    SessionListOut,
    SessionOut,
    session_detail_out,
    session_out,
    session_summary_out,
)
from .store import (
    SessionStore,
    SessionStoppedError,
    UnknownSessionError,
    VersionConflictError,
)


def create_app(data_dir: str | Path) -> FastAPI:
    store = SessionStore(data_dir)
    app = FastAPI(title="lrtrial session service", version="0.1.0")
    app.state.store = store

    # Single-operator tool served off localhost; the browser UI may run on
    # a different port, so CORS stays permissive.
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(DesignError)
    async def _design_error(_: Request, exc: DesignError) -> JSONResponse:
        detail = [{"field": f, "message": m} for f, m in exc.problems]
        return JSONResponse(status_code=422, content={"detail": detail})

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok"}

    @app.post("/sessions", response_model=SessionOut, status_code=201)
    def create_session(design: DesignIn) -> SessionOut:
        trial_design = TrialDesign(
            delta=design.delta,
            lr_upper=design.lr_upper,
            lr_lower=design.lr_lower,
            z_crit=design.z_crit,
            label=design.label,
        )
        return session_out(store.create_session(trial_design))

    @app.get("/sessions", response_model=SessionListOut)
    def list_sessions(
        status: str | None = Query(default=None),
        limit: int = Query(default=100, ge=1, le=1000),
        token: str | None = Query(default=None),
    ) -> SessionListOut:
        status_filter = None
        if status is not None:
            try:
                status_filter = TrialStatus(status)
            except ValueError:
                raise HTTPException(
                    status_code=422,
                    detail=f"unknown status {status!r}; expected one of "
                    f"{[s.value for s in TrialStatus]}",
                )
        offset = 0
        if token is not None:
            try:
                offset = int(token)
                if offset < 0:
                    raise ValueError
            except ValueError:
                raise HTTPException(status_code=422, detail=f"invalid page token {token!r}")
        records, next_offset = store.list_sessions(
            status=status_filter, limit=limit, offset=offset
        )
        return SessionListOut(
            sessions=[session_summary_out(r) for r in records],
            next_token=str(next_offset) if next_offset is not None else None,
        )

    @app.get("/sessions/{session_id}", response_model=SessionDetailOut)
    def get_session(session_id: str) -> SessionDetailOut:
        try:
            return session_detail_out(store.get_session(session_id))
        except UnknownSessionError:
            raise HTTPException(status_code=404, detail=f"unknown session {session_id!r}")

    @app.post("/sessions/{session_id}/observations", response_model=SessionOut)
    def post_observation(session_id: str, observation: ObservationIn) -> SessionOut:
        try:
            record = store.add_observation(
                session_id, observation.value, observation.expected_version
            )
        except UnknownSessionError:
            raise HTTPException(status_code=404, detail=f"unknown session {session_id!r}")
        except SessionStoppedError as exc:
            raise HTTPException(
                status_code=409,
                detail={
                    "reason": "session_stopped",
                    "status": exc.status.value,
                    "n": exc.n,
                    "message": str(exc),
                },
            )
        except VersionConflictError as exc:
            raise HTTPException(
                status_code=409,
                detail={
                    "reason": "version_conflict",
                    "expected_version": exc.expected,
                    "actual_version": exc.actual,
                    "message": str(exc),
                },
            )
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        return session_out(record)

    @app.get("/sessions/{session_id}/export.csv")
    def export_csv(session_id: str) -> Response:
        try:
            content = store.export_csv(session_id)
        except UnknownSessionError:
            raise HTTPException(status_code=404, detail=f"unknown session {session_id!r}")
        return Response(
            content=content,
            media_type="text/csv",
            headers={
                "Content-Disposition": f'attachment; filename="{session_id}.csv"'
            },
        )

    return app
