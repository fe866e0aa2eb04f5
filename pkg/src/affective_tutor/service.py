"""HTTP/JSON surface for browsers and other clients.

The service owns the sessions; clients only see envelopes (never answer
keys or, unless debugging, raw intensities). Requests against one session
are serialized with a per-session lock.
"""

from __future__ import annotations

import logging
import random
import threading
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from fastapi import FastAPI, HTTPException
from fastapi.responses import PlainTextResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from . import assets
from .appraisal import WeightTable
from .personality import FormError, QuestionnaireForm, load_form
from .session import (
    ExerciseBank,
    LearnerAction,
    Mode,
    SessionClosedError,
    SessionState,
    export_log,
    load_exercise_bank,
    start_session,
    step,
)
from .tactics import KnowledgeBase, ScriptCatalog, load_behavior_scripts, load_knowledge_base

logger = logging.getLogger(__name__)


@dataclass
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8000
    form_path: str | None = None      # None falls back to the packaged default
    bank_path: str | None = None
    kb_path: str | None = None
    scripts_path: str | None = None
    static_dir: str | None = None
    default_mode: Mode = Mode.ENV3
    fixed_seed: int | None = None     # None draws a fresh seed per session
    debug_emotions: bool = False
    vca_skill: float = 0.6


class CreateSessionBody(BaseModel):
    answers: dict[str, float]
    mode: str | None = None


class ActionBody(BaseModel):
    type: str
    answer: str | None = None
    rt: float = Field(default=0.0, ge=0.0)
    effort: float | None = Field(default=None, ge=0.0, le=1.0)


@dataclass
class _Runtime:
    form: QuestionnaireForm
    bank: ExerciseBank
    kb: KnowledgeBase
    scripts: ScriptCatalog
    config: ServiceConfig
    weights: WeightTable = field(default_factory=WeightTable)
    sessions: dict[str, SessionState] = field(default_factory=dict)
    locks: dict[str, threading.Lock] = field(default_factory=dict)


def _envelope(session: SessionState, debug: bool) -> dict[str, Any]:
    exercise = session.current_exercise
    behaviors: list[dict[str, Any]] = []
    for record in reversed(session.log):
        if record.plan is not None:
            behaviors = [b.as_dict() for b in record.plan.realized]
            break
    levels = {}
    if session.mode is not Mode.ENV1:
        levels = {k.value: v.value for k, v in session.emotions.levels().items()}
    out: dict[str, Any] = {
        "id": session.id,
        "mode": session.mode.value,
        "status": session.status.value,
        "personality": session.profile.type_code,
        "group": session.group.value,
        "vca": session.vca,
        "exercise": None,
        "exercise_index": session.cursor,
        "exercise_total": len(session.bank),
        "behaviors": behaviors,
        "emotions": levels,
        "progress": {
            "answered": len(session.history),
            "correct": sum(1 for h in session.history if h),
        },
        "seq": len(session.log),
    }
    if exercise is not None:
        out["exercise"] = exercise.public_dict()
    if debug:
        out["intensities"] = session.emotions.as_dict()
    return out


def _load_runtime(config: ServiceConfig) -> _Runtime:
    form = load_form(config.form_path) if config.form_path else assets.default_form()
    bank = (
        load_exercise_bank(config.bank_path) if config.bank_path else assets.default_bank()
    )
    kb = (
        load_knowledge_base(config.kb_path)
        if config.kb_path
        else assets.default_knowledge_base()
    )
    scripts = (
        load_behavior_scripts(config.scripts_path)
        if config.scripts_path
        else assets.default_scripts()
    )
    return _Runtime(form=form, bank=bank, kb=kb, scripts=scripts, config=config)


def create_app(config: ServiceConfig | None = None) -> FastAPI:
    """Build the application; all referenced files are validated here."""
    config = config or ServiceConfig()
    rt = _load_runtime(config)
    app = FastAPI(title="affective-tutor", version="0.1.0")

    @app.get("/questionnaire")
    def questionnaire() -> dict[str, Any]:
        return {
            "version": rt.form.version,
            "items": [
                {
                    "id": it.id,
                    "prompt": it.prompt,
                    "dimension": it.dimension,
                }
                for it in rt.form.items
            ],
        }

    @app.post("/sessions", status_code=201)
    def create_session(body: CreateSessionBody) -> dict[str, Any]:
        mode_name = body.mode or rt.config.default_mode.value
        try:
            mode = Mode(mode_name)
        except ValueError:
            raise HTTPException(422, f"unknown mode {mode_name!r}") from None
        seed = (
            rt.config.fixed_seed
            if rt.config.fixed_seed is not None
            else random.SystemRandom().randrange(2**32)
        )
        try:
            session = start_session(
                mode=mode,
                form=rt.form,
                answers=body.answers,
                bank=rt.bank,
                kb=rt.kb,
                scripts=rt.scripts,
                seed=seed,
                session_id=uuid.uuid4().hex[:12],
                vca_skill=rt.config.vca_skill,
            )
        except FormError as exc:
            raise HTTPException(422, str(exc)) from None
        rt.sessions[session.id] = session
        rt.locks[session.id] = threading.Lock()
        logger.info("created session %s (seed %d logged in its export)", session.id, seed)
        return _envelope(session, rt.config.debug_emotions)

    def _get(session_id: str) -> SessionState:
        session = rt.sessions.get(session_id)
        if session is None:
            raise HTTPException(404, f"no session {session_id!r}")
        return session

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str) -> dict[str, Any]:
        return _envelope(_get(session_id), rt.config.debug_emotions)

    @app.post("/sessions/{session_id}/actions")
    def post_action(session_id: str, body: ActionBody) -> dict[str, Any]:
        session = _get(session_id)
        try:
            action = LearnerAction.from_dict(body.model_dump(exclude_none=True))
        except ValueError as exc:
            raise HTTPException(422, str(exc)) from None
        with rt.locks[session_id]:
            try:
                step(session, action)
            except SessionClosedError as exc:
                raise HTTPException(409, str(exc)) from None
        return _envelope(session, rt.config.debug_emotions)

    @app.get("/sessions/{session_id}/log")
    def get_log(session_id: str) -> PlainTextResponse:
        session = _get(session_id)
        with rt.locks[session_id]:
            text = export_log(session)
        return PlainTextResponse(text, media_type="application/x-ndjson")

    if config.static_dir:
        static = Path(config.static_dir)
        if not static.is_dir():
            raise ValueError(f"static directory {static} does not exist")
        app.mount("/", StaticFiles(directory=static, html=True), name="static")

    return app


def serve(config: ServiceConfig) -> None:
    """Run the service under uvicorn; blocks until interrupted."""
    import uvicorn

    app = create_app(config)
    uvicorn.run(app, host=config.host, port=config.port, log_level="info")
