"""Confirmation-gated conversational explanation service.

One-shot query flow: the learner asks about an LO on their recommended
path, the service replies with a deterministic interpretation to
confirm, and only an accepted confirmation triggers the single
generation call that fills the explanation template.
"""

from __future__ import annotations

import threading
import time
import uuid
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .communities import CommunityAssignment
from .config import AppConfig
from .context import assemble, render
from .errors import (
    KgxplainError,
    UnknownSession,
    UnresolvedTarget,
    WrongPhase,
)
from .gateway import Gateway, GenerationRequest
from .kg import KnowledgeGraph, NodeId
from .prompting import build_prompt, fill_template
from .recommender import LearningPath, recommend_path

DEFAULT_SESSION_TTL_S = 30 * 60


class Phase(str, Enum):
    AWAITING_QUESTION = "awaiting_question"
    AWAITING_CONFIRMATION = "awaiting_confirmation"
    ANSWERED = "answered"


class QuestionKind(str, Enum):
    ABOUT_CONTENT = "about_content"
    WHY_RELEVANT = "why_relevant"
    PATH_RELATIONS = "path_relations"


_KIND_LABELS = {
    QuestionKind.ABOUT_CONTENT: "about the content of",
    QuestionKind.WHY_RELEVANT: "why it is relevant",
    QuestionKind.PATH_RELATIONS: "how it relates to the other materials",
}


@dataclass
class Session:
    session_id: str
    path: LearningPath
    phase: Phase = Phase.AWAITING_QUESTION
    pending_interpretation: Optional[str] = None
    pending_kind: Optional[QuestionKind] = None
    target: Optional[NodeId] = None
    touched_at: float = field(default_factory=time.monotonic)
    lock: threading.Lock = field(default_factory=threading.Lock)


class SessionStore:
    """In-memory sessions with TTL eviction; per-session mutual exclusion."""

    def __init__(self, ttl_s: float = DEFAULT_SESSION_TTL_S):
        self.ttl_s = ttl_s
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()

    def create(self, path: LearningPath) -> Session:
        session = Session(session_id=uuid.uuid4().hex, path=path)
        with self._lock:
            self._evict()
            self._sessions[session.session_id] = session
        return session

    def get(self, session_id: str) -> Session:
        with self._lock:
            self._evict()
            session = self._sessions.get(session_id)
        if session is None:
            raise UnknownSession(f"no session {session_id!r}")
        session.touched_at = time.monotonic()
        return session

    def _evict(self) -> None:
        now = time.monotonic()
        expired = [
            sid for sid, s in self._sessions.items() if now - s.touched_at > self.ttl_s
        ]
        for sid in expired:
            del self._sessions[sid]


def classify_question(
    graph: KnowledgeGraph, path: LearningPath, question: str
) -> tuple[QuestionKind, NodeId]:
    """Keyword/title matching; the confirmation step catches mistakes."""
    lowered = question.lower()
    target = None
    best_len = 0
    for node_id in path.steps:
        node = graph.node(node_id)
        if not node.is_learning_object:
            continue
        title = node.title.lower()
        if title in lowered and len(title) > best_len:
            target = node_id
            best_len = len(title)
    if target is None:
        titles = [
            graph.node(n).title for n in path.steps if graph.node(n).is_learning_object
        ]
        raise UnresolvedTarget(
            "question does not name a learning object on the path", candidates=titles
        )
    if any(word in lowered for word in ("relate", "relation", "connect", "between", "link")):
        kind = QuestionKind.PATH_RELATIONS
    elif any(word in lowered for word in ("why", "relevant", "goal", "need")):
        kind = QuestionKind.WHY_RELEVANT
    else:
        kind = QuestionKind.ABOUT_CONTENT
    return kind, target


# -- request/response models -------------------------------------------------

class StartSessionRequest(BaseModel):
    start: str
    goal: str


class AskRequest(BaseModel):
    question: str


class ConfirmRequest(BaseModel):
    accepted: bool


_STATUS_BY_CODE = {
    "unknown_session": 404,
    "unknown_node": 404,
    "no_path_found": 404,
    "not_a_goal": 422,
    "not_a_learning_object": 422,
    "unresolved_target": 422,
    "wrong_phase": 409,
    "backend_unavailable": 502,
    "auth_error": 502,
    "protocol_error": 502,
    "timeout": 504,
}


def _path_payload(graph: KnowledgeGraph, path: LearningPath) -> dict:
    return {
        "goal": path.goal,
        "goal_title": graph.node(path.goal).title,
        "steps": [
            {
                "id": node_id,
                "title": graph.node(node_id).title,
                "level": graph.node(node_id).level.value,
            }
            for node_id in path.steps
        ],
        "step_scores": list(path.step_scores),
    }


def create_app(
    graph: KnowledgeGraph,
    assignment: CommunityAssignment,
    gateway: Gateway,
    config: Optional[AppConfig] = None,
    session_ttl_s: float = DEFAULT_SESSION_TTL_S,
) -> FastAPI:
    config = config or AppConfig()
    app = FastAPI(title="kgxplain explanation service")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    store = SessionStore(ttl_s=session_ttl_s)
    app.state.gateway = gateway
    app.state.store = store

    @app.exception_handler(KgxplainError)
    async def handle_domain_error(request: Request, exc: KgxplainError):
        code = getattr(exc, "code", "error")
        body = {"error": {"code": code, "message": str(exc)}}
        if isinstance(exc, UnresolvedTarget):
            body["error"]["candidates"] = exc.candidates
        return JSONResponse(status_code=_STATUS_BY_CODE.get(code, 400), content=body)

    @app.get("/health")
    def health():
        return {"status": "ok", "nodes": len(graph)}

    @app.post("/sessions")
    def start_session(body: StartSessionRequest):
        path = recommend_path(graph, body.start, body.goal, config.recommender)
        session = store.create(path)
        return {
            "session_id": session.session_id,
            "phase": session.phase.value,
            "path": _path_payload(graph, path),
        }

    @app.get("/sessions/{session_id}/path")
    def get_path(session_id: str):
        session = store.get(session_id)
        return {
            "session_id": session.session_id,
            "phase": session.phase.value,
            "path": _path_payload(graph, session.path),
        }

    @app.post("/sessions/{session_id}/ask")
    def ask(session_id: str, body: AskRequest):
        session = store.get(session_id)
        with session.lock:
            if session.phase not in (Phase.AWAITING_QUESTION, Phase.ANSWERED):
                raise WrongPhase(f"cannot ask while {session.phase.value}")
            kind, target = classify_question(graph, session.path, body.question)
            title = graph.node(target).title
            interpretation = (
                f"You are asking {_KIND_LABELS[kind]} '{title}' — is that correct?"
            )
            session.phase = Phase.AWAITING_CONFIRMATION
            session.pending_interpretation = interpretation
            session.pending_kind = kind
            session.target = target
            return {
                "session_id": session.session_id,
                "phase": session.phase.value,
                "interpretation": interpretation,
                "kind": kind.value,
                "target": target,
            }

    @app.post("/sessions/{session_id}/confirm")
    def confirm(session_id: str, body: ConfirmRequest):
        session = store.get(session_id)
        with session.lock:
            if session.phase is not Phase.AWAITING_CONFIRMATION:
                raise WrongPhase(f"cannot confirm while {session.phase.value}")
            if not body.accepted:
                session.phase = Phase.AWAITING_QUESTION
                session.pending_interpretation = None
                session.pending_kind = None
                session.target = None
                return {"session_id": session.session_id, "phase": session.phase.value}
            target = session.target
            assert target is not None
            try:
                bundle = assemble(graph, assignment, target, config.limits)
                context_text = render(bundle)
                goal_title = graph.node(session.path.goal).title
                doc = build_prompt(
                    context_text,
                    config.role,
                    config.definitions,
                    config.template,
                    graph.node(target).title,
                    goal_title,
                )
                result = gateway.generate(
                    GenerationRequest(
                        system_text=doc.system_text(),
                        user_text=doc.user_text(),
                        max_words=config.template.total_budget,
                        backend_id=gateway.backend.backend_id,
                    )
                )
                explanation = fill_template(config.template, result.text, True)
            except KgxplainError:
                # generation failed: leave the session ready for a retry
                session.phase = Phase.AWAITING_QUESTION
                session.pending_interpretation = None
                session.pending_kind = None
                session.target = None
                raise
            session.phase = Phase.ANSWERED
            session.pending_interpretation = None
            return {
                "session_id": session.session_id,
                "phase": session.phase.value,
                "target": target,
                "explanation": {
                    "filled_text": explanation.filled_text,
                    "slot_values": explanation.slot_values,
                    "contextualized": explanation.contextualized,
                },
            }

    return app
