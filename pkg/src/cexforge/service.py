"""Local HTTP/JSON session API (FastAPI) driving the refinement workflow.

Sessions live in memory, keyed by random 128-bit ids; one lock per session
serializes its mutations.  Endpoints are versioned under /v1.
"""
from __future__ import annotations

import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal

from fastapi import APIRouter, FastAPI, HTTPException, Response
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, Field

from . import ingest
from .model import Comparison, LabelNotFoundError, ReachabilityProperty
from .scc import vertex_id
from .session import InvalidActionError, RefinementSession, SessionStatus
from .subsystem import stats


class PropertyIn(BaseModel):
    target_label: str
    threshold: float = Field(ge=0.0, le=1.0)
    comparison: Literal["le", "lt"] = "le"


class SessionCreate(BaseModel):
    tra: str | None = None
    lab: str | None = None
    model_name: str | None = None
    property: PropertyIn
    method: Literal["global", "local"] = "global"


class SessionOut(BaseModel):
    id: str
    status: str
    probability: float


class VertexDto(BaseModel):
    id: str
    kind: Literal["concrete", "abstract"]
    node: int | None = None
    covered: list[int]
    labels: list[str]
    in_subsystem: bool


class EdgeDto(BaseModel):
    src: str
    dst: str
    prob: float
    in_subsystem: bool


class GaugeDto(BaseModel):
    probability: float
    threshold: float
    comparison: str
    status: str


class ViewDto(BaseModel):
    vertices: list[VertexDto]
    edges: list[EdgeDto]
    gauge: GaugeDto


class ConcretizeIn(BaseModel):
    nodes: list[int]


class GcPolicy(BaseModel):
    ttl_seconds: float = 3600.0


@dataclass
class _Entry:
    session: RefinementSession
    lock: threading.Lock = field(default_factory=threading.Lock)
    last_access: float = field(default_factory=time.monotonic)


class SessionStore:
    def __init__(self) -> None:
        self._entries: dict[str, _Entry] = {}
        self._lock = threading.Lock()

    def add(self, session: RefinementSession) -> str:
        sid = uuid.uuid4().hex
        with self._lock:
            self._entries[sid] = _Entry(session)
        return sid

    def get(self, sid: str) -> _Entry:
        with self._lock:
            entry = self._entries.get(sid)
        if entry is None:
            raise HTTPException(status_code=404, detail=f"unknown session {sid}")
        entry.last_access = time.monotonic()
        return entry

    def delete(self, sid: str) -> None:
        with self._lock:
            if sid not in self._entries:
                raise HTTPException(status_code=404, detail=f"unknown session {sid}")
            del self._entries[sid]

    def gc(self, policy: GcPolicy) -> list[str]:
        """Evict idle sessions; a session whose lock is held is never evicted."""
        now = time.monotonic()
        evicted = []
        with self._lock:
            for sid, entry in list(self._entries.items()):
                if now - entry.last_access < policy.ttl_seconds:
                    continue
                if not entry.lock.acquire(blocking=False):
                    continue
                try:
                    del self._entries[sid]
                    evicted.append(sid)
                finally:
                    entry.lock.release()
        return evicted


def _view_dto(session: RefinementSession) -> ViewDto:
    view = session.view
    sub = session.subsystem
    sub_vertices = sub.vertices if sub else set()
    sub_edges = sub.closure_edges() if sub else set()
    vertices = []
    for v in view.vertices:
        abstract = not isinstance(v, int)
        vertices.append(
            VertexDto(
                id=vertex_id(v),
                kind="abstract" if abstract else "concrete",
                node=v[0] if abstract else None,
                covered=sorted(view.covered(v)),
                labels=sorted(view.vertex_labels(v)),
                in_subsystem=v in sub_vertices,
            )
        )
    edges = []
    for v in view.vertices:
        for t, p in view.adj[v]:
            edges.append(
                EdgeDto(
                    src=vertex_id(v),
                    dst=vertex_id(t),
                    prob=p,
                    in_subsystem=(v, t) in sub_edges,
                )
            )
    gauge = GaugeDto(
        probability=(sub.cached_prob or 0.0) if sub else 0.0,
        threshold=session.prop.threshold,
        comparison=session.prop.comparison.value,
        status=session.status.value,
    )
    return ViewDto(vertices=vertices, edges=edges, gauge=gauge)


def create_app(model_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="cexforge session API", version="1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origin_regex=r"https?://(localhost|127\.0\.0\.1)(:\d+)?",
        allow_methods=["*"],
        allow_headers=["*"],
    )
    store = SessionStore()
    app.state.store = store
    router = APIRouter(prefix="/v1")

    def _session_out(sid: str, session: RefinementSession) -> SessionOut:
        return SessionOut(id=sid, status=session.status.value, probability=session.check_prob)

    @router.post("/sessions", status_code=201, response_model=SessionOut)
    def create_session(body: SessionCreate):
        try:
            if body.model_name is not None:
                if model_dir is None:
                    raise HTTPException(status_code=400, detail="no model directory configured")
                base = Path(model_dir) / body.model_name
                tra_text = (base.with_suffix(".tra")).read_text(encoding="utf-8")
                lab_text = (base.with_suffix(".lab")).read_text(encoding="utf-8")
            elif body.tra is not None and body.lab is not None:
                tra_text, lab_text = body.tra, body.lab
            else:
                raise HTTPException(status_code=400, detail="provide tra+lab or model_name")
            model = ingest.parse_lab(lab_text, ingest.parse_tra(tra_text))
            prop = ReachabilityProperty(
                Comparison(body.property.comparison),
                body.property.threshold,
                body.property.target_label,
            )
            session = RefinementSession(model, prop, method=body.method)
        except HTTPException:
            raise
        except (ingest.ParseError, LabelNotFoundError, ValueError, OSError) as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        if session.status is SessionStatus.SATISFIED:
            raise HTTPException(
                status_code=422,
                detail={"verdict": "holds", "prob": session.check_prob},
            )
        return _session_out(store.add(session), session)

    @router.get("/sessions/{sid}/view", response_model=ViewDto)
    def get_view(sid: str):
        entry = store.get(sid)
        with entry.lock:
            return _view_dto(entry.session)

    @router.post("/sessions/{sid}/search", response_model=SessionOut)
    def post_search(sid: str):
        entry = store.get(sid)
        with entry.lock:
            try:
                entry.session.run_search()
            except InvalidActionError as exc:
                raise HTTPException(status_code=409, detail=str(exc)) from exc
            return _session_out(sid, entry.session)

    @router.post("/sessions/{sid}/concretize", response_model=SessionOut)
    def post_concretize(sid: str, body: ConcretizeIn):
        entry = store.get(sid)
        with entry.lock:
            try:
                entry.session.concretize(body.nodes)
            except InvalidActionError as exc:
                raise HTTPException(status_code=409, detail=str(exc)) from exc
            return _session_out(sid, entry.session)

    @router.post("/sessions/{sid}/undo", response_model=SessionOut)
    def post_undo(sid: str):
        entry = store.get(sid)
        with entry.lock:
            try:
                entry.session.undo()
            except InvalidActionError as exc:
                raise HTTPException(status_code=409, detail=str(exc)) from exc
            return _session_out(sid, entry.session)

    @router.get("/sessions/{sid}/report")
    def get_report(sid: str):
        entry = store.get(sid)
        with entry.lock:
            return Response(content=entry.session.export(), media_type="application/json")

    @router.delete("/sessions/{sid}", status_code=204)
    def delete_session(sid: str):
        store.delete(sid)

    app.include_router(router)

    @app.get("/schema")
    def schema():
        return app.openapi()

    return app
