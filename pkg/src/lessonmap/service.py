"""HTTP boundary: a versioned JSON API over sessions, agents, and exports.

Every error surfaces as one structured shape, {"code", "message"}, with the
HTTP status carrying the class of failure; module errors map one-to-one to
machine codes. Mutations run under the owning session's lock; each session
admits at most one in-flight agent call (others get code "busy").
"""

from __future__ import annotations

from typing import Any, Optional

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, Response
from pydantic import BaseModel
from starlette.exceptions import HTTPException as StarletteHTTPException

from . import analytics, export
from .agents import (
    AgentKind,
    MissingTargetError,
    RetryPolicy,
    ScriptExhaustedError,
    TransportError,
    build_context,
    invoke,
    ledger_report,
)
from .config import ServiceConfig
from .graph import (
    EmptyLabelError,
    EmptyTitleError,
    GraphError,
    InvalidKindError,
    SelfLoopError,
    UnknownEdgeError,
    UnknownEndpointError,
    UnknownNodeError,
    graph_to_snapshot,
    parse_kind,
)
from .hints import HintLibrary
from .protocol import (
    AlreadyResolvedError,
    InvalidSelectionError,
    PendingSuggestion,
    ProtocolError,
    apply_suggestion,
    reject_suggestion,
)
from .store import (
    SCHEMA_VERSION,
    CorruptLogError,
    Session,
    SessionStore,
    StorageFailureError,
    UnknownSessionError,
)


class ApiError(Exception):
    """Transportable error: HTTP status plus machine code plus message."""

    def __init__(self, status: int, code: str, message: str) -> None:
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message

    def response(self) -> JSONResponse:
        return JSONResponse(
            status_code=self.status, content={"code": self.code, "message": self.message}
        )


_ERROR_MAP: list[tuple[type, int, str]] = [
    (EmptyTitleError, 422, "empty_title"),
    (InvalidKindError, 422, "invalid_kind"),
    (SelfLoopError, 422, "self_loop"),
    (EmptyLabelError, 422, "empty_label"),
    (UnknownEndpointError, 404, "unknown_endpoint"),
    (UnknownNodeError, 404, "unknown_node"),
    (UnknownEdgeError, 404, "unknown_edge"),
    (UnknownSessionError, 404, "unknown_session"),
    (AlreadyResolvedError, 409, "already_resolved"),
    (InvalidSelectionError, 422, "invalid_selection"),
    (MissingTargetError, 422, "missing_target"),
    (export.UnsupportedFormatError, 400, "unsupported_format"),
    (analytics.EmptyLexiconError, 500, "empty_lexicon"),
    (ScriptExhaustedError, 502, "script_exhausted"),
    (TransportError, 502, "transport_error"),
    (StorageFailureError, 500, "storage_failure"),
    (CorruptLogError, 500, "corrupt_log"),
    (GraphError, 422, "graph_error"),
]


def _to_api_error(exc: Exception) -> ApiError:
    for exc_type, status, code in _ERROR_MAP:
        if isinstance(exc, exc_type):
            return ApiError(status, code, str(exc))
    return ApiError(500, "internal_error", str(exc))


# -- request bodies -----------------------------------------------------------


class SessionBody(BaseModel):
    task_label: str = ""


class NodeBody(BaseModel):
    tag: str
    title: str
    description: str = ""
    x: Optional[float] = None
    y: Optional[float] = None


class NodePatch(BaseModel):
    tag: Optional[str] = None
    title: Optional[str] = None
    description: Optional[str] = None
    x: Optional[float] = None
    y: Optional[float] = None


class EdgeBody(BaseModel):
    source: str
    target: str
    label: Optional[str] = None


class EdgePatch(BaseModel):
    label: str


class ChatBody(BaseModel):
    text: str


class AgentBody(BaseModel):
    instruction: Optional[str] = None


class ResolveBody(BaseModel):
    decision: str
    selection: Optional[list[int]] = None


def _session_summary(session: Session) -> dict[str, Any]:
    return {
        "id": session.id,
        "task_label": session.task_label,
        "created_at": session.created_at,
    }


def _session_detail(session: Session) -> dict[str, Any]:
    return {
        "schema_version": SCHEMA_VERSION,
        **_session_summary(session),
        "graph": graph_to_snapshot(session.graph),
        "chat": [
            {
                "index": turn.index,
                "author": turn.author,
                "text": turn.text,
                "timestamp": turn.timestamp,
            }
            for turn in session.chat
        ],
        "pending_suggestions": [s.to_wire() for s in session.pending.values()],
    }


def create_app(
    store: SessionStore,
    llm: Any,
    config: Optional[ServiceConfig] = None,
) -> FastAPI:
    """Build the API application around a session store and an endpoint."""
    config = config or ServiceConfig()
    policy = RetryPolicy(max_retries=config.max_retries)
    hints = HintLibrary(config.hints_path)
    lexicon = analytics.load_lexicon(config.lexicon_path)
    app = FastAPI(title="lessonmap", docs_url=None, redoc_url=None, openapi_url=None)

    @app.exception_handler(ApiError)
    async def _api_error(request: Request, exc: ApiError) -> JSONResponse:
        return exc.response()

    @app.exception_handler(RequestValidationError)
    async def _validation_error(request: Request, exc: RequestValidationError) -> JSONResponse:
        return ApiError(422, "validation_error", str(exc.errors()[:3])).response()

    @app.exception_handler(StarletteHTTPException)
    async def _http_error(request: Request, exc: StarletteHTTPException) -> JSONResponse:
        code = {404: "not_found", 405: "method_not_allowed"}.get(
            exc.status_code, "http_error"
        )
        return ApiError(exc.status_code, code, str(exc.detail)).response()

    @app.exception_handler(Exception)
    async def _any_error(request: Request, exc: Exception) -> JSONResponse:
        return _to_api_error(exc).response()

    def _get_session(session_id: str) -> Session:
        try:
            session = store.get_session(session_id)
        except UnknownSessionError as exc:
            raise ApiError(404, "unknown_session", str(exc)) from exc
        session.ledger.rate_in = config.rate_in
        session.ledger.rate_out = config.rate_out
        return session

    # -- sessions ------------------------------------------------------------

    @app.post("/v1/sessions")
    def create_session(body: SessionBody) -> dict[str, Any]:
        session = store.create_session(body.task_label)
        session.ledger.rate_in = config.rate_in
        session.ledger.rate_out = config.rate_out
        return _session_detail(session)

    @app.get("/v1/sessions")
    def list_sessions() -> dict[str, Any]:
        return {"sessions": store.list_sessions()}

    @app.get("/v1/sessions/{session_id}")
    def get_session(session_id: str) -> dict[str, Any]:
        return _session_detail(_get_session(session_id))

    @app.get("/v1/sessions/{session_id}/revision")
    def get_revision(session_id: str) -> dict[str, Any]:
        return {"revision": _get_session(session_id).graph.revision}

    # -- graph mutations --------------------------------------------------------

    @app.post("/v1/sessions/{session_id}/nodes")
    def add_node(session_id: str, body: NodeBody) -> dict[str, Any]:
        session = _get_session(session_id)
        if (body.x is None) != (body.y is None):
            raise ApiError(422, "invalid_position", "x and y must be given together")
        position = (body.x, body.y) if body.x is not None else None
        with session.lock:
            try:
                node = session.graph.add_node(
                    body.tag, body.title, body.description, position=position
                )
            except GraphError as exc:
                raise _to_api_error(exc) from exc
            return {"node": node.to_wire(), "revision": session.graph.revision}

    @app.patch("/v1/sessions/{session_id}/nodes/{node_id}")
    def modify_node(session_id: str, node_id: str, body: NodePatch) -> dict[str, Any]:
        session = _get_session(session_id)
        if (body.x is None) != (body.y is None):
            raise ApiError(422, "invalid_position", "x and y must be given together")
        with session.lock:
            try:
                if body.x is not None and body.y is not None:
                    session.graph.set_position(node_id, body.x, body.y)
                if any(v is not None for v in (body.title, body.description, body.tag)):
                    session.graph.modify_node(
                        node_id,
                        new_title=body.title,
                        new_description=body.description,
                        new_kind=body.tag,
                    )
                node = session.graph.nodes.get(node_id)
                if node is None:
                    raise UnknownNodeError(f"unknown node id {node_id!r}")
            except GraphError as exc:
                raise _to_api_error(exc) from exc
            return {"node": node.to_wire(), "revision": session.graph.revision}

    @app.delete("/v1/sessions/{session_id}/nodes/{node_id}")
    def delete_node(session_id: str, node_id: str) -> dict[str, Any]:
        session = _get_session(session_id)
        with session.lock:
            try:
                removed = session.graph.delete_node(node_id)
            except GraphError as exc:
                raise _to_api_error(exc) from exc
            return {"deleted_edges": removed, "revision": session.graph.revision}

    @app.post("/v1/sessions/{session_id}/edges")
    def create_edge(session_id: str, body: EdgeBody) -> dict[str, Any]:
        session = _get_session(session_id)
        with session.lock:
            try:
                edge = session.graph.create_edge(body.source, body.target, body.label)
            except GraphError as exc:
                raise _to_api_error(exc) from exc
            return {"edge": edge.to_wire(), "revision": session.graph.revision}

    @app.patch("/v1/sessions/{session_id}/edges/{edge_id}")
    def set_edge_label(session_id: str, edge_id: str, body: EdgePatch) -> dict[str, Any]:
        session = _get_session(session_id)
        with session.lock:
            try:
                edge = session.graph.set_edge_label(edge_id, body.label)
            except GraphError as exc:
                raise _to_api_error(exc) from exc
            return {"edge": edge.to_wire(), "revision": session.graph.revision}

    @app.delete("/v1/sessions/{session_id}/edges/{edge_id}")
    def delete_edge(session_id: str, edge_id: str) -> dict[str, Any]:
        session = _get_session(session_id)
        with session.lock:
            try:
                session.graph.delete_edge(edge_id)
            except GraphError as exc:
                raise _to_api_error(exc) from exc
            return {"revision": session.graph.revision}

    # -- agent calls --------------------------------------------------------------

    def _run_agent(
        session: Session,
        agent: AgentKind,
        target_node_id: Optional[str],
        user_message: Optional[str],
    ) -> PendingSuggestion:
        """Shared invoke path; caller must hold the agent slot."""
        bundle = build_context(
            agent, session, target_node_id=target_node_id, user_message=user_message
        )
        result = invoke(
            agent,
            bundle,
            policy,
            llm,
            graph=session.graph,
            target_node_id=target_node_id,
            ledger=session.ledger,
            model=config.model_name,
            on_protocol_error=lambda err, attempt: session.record_protocol_error(
                err, agent.value, attempt
            ),
        )
        if isinstance(result, ProtocolError):
            raise ApiError(
                502, "protocol_error", f"{result.category.value}: {result.detail}"
            )
        return result

    @app.post("/v1/sessions/{session_id}/chat")
    def chat(session_id: str, body: ChatBody) -> dict[str, Any]:
        session = _get_session(session_id)
        if not session.begin_agent_call():
            raise ApiError(409, "busy", "an agent call is already in flight")
        try:
            with session.lock:
                session.add_chat_turn("user", body.text)
            suggestion = _run_agent(session, AgentKind.GLOBAL, None, None)
            with session.lock:
                session.add_chat_turn("assistant", suggestion.narration)
                if suggestion.item_count() > 0:
                    session.offer_suggestion(suggestion)
                    wire = suggestion.to_wire()
                else:
                    wire = None
            return {"assistant_narration": suggestion.narration, "suggestion": wire}
        finally:
            session.end_agent_call()

    def _node_agent(
        session_id: str, node_id: str, agent: AgentKind, instruction: Optional[str]
    ) -> dict[str, Any]:
        session = _get_session(session_id)
        node = session.graph.nodes.get(node_id)
        if node is None:
            raise ApiError(404, "unknown_node", f"unknown node id {node_id!r}")
        if not session.begin_agent_call():
            raise ApiError(409, "busy", "an agent call is already in flight")
        try:
            original = node.to_wire()
            suggestion = _run_agent(session, agent, node_id, instruction)
            with session.lock:
                session.offer_suggestion(suggestion)
            return {"suggestion": suggestion.to_wire(), "original": original}
        finally:
            session.end_agent_call()

    @app.post("/v1/sessions/{session_id}/nodes/{node_id}/refine")
    def refine(session_id: str, node_id: str, body: AgentBody) -> dict[str, Any]:
        return _node_agent(session_id, node_id, AgentKind.REFINE, body.instruction)

    @app.post("/v1/sessions/{session_id}/nodes/{node_id}/split")
    def split(session_id: str, node_id: str, body: AgentBody) -> dict[str, Any]:
        return _node_agent(session_id, node_id, AgentKind.SPLIT, body.instruction)

    @app.post("/v1/sessions/{session_id}/suggestions/{suggestion_id}/resolve")
    def resolve_suggestion(
        session_id: str, suggestion_id: str, body: ResolveBody
    ) -> dict[str, Any]:
        session = _get_session(session_id)
        suggestion = session.pending.get(suggestion_id)
        if suggestion is None:
            raise ApiError(404, "unknown_suggestion", f"no pending suggestion {suggestion_id!r}")
        if body.decision not in ("accept", "reject"):
            raise ApiError(422, "invalid_decision", "decision must be accept or reject")
        with session.lock:
            try:
                if body.decision == "accept":
                    apply_suggestion(session.graph, suggestion, body.selection)
                else:
                    reject_suggestion(session.graph, suggestion)
            except UnknownNodeError as exc:
                session.pending.pop(suggestion_id, None)
                raise ApiError(409, "stale_suggestion", str(exc)) from exc
            except (AlreadyResolvedError, InvalidSelectionError) as exc:
                raise _to_api_error(exc) from exc
            session.pending.pop(suggestion_id, None)
            return {
                "suggestion": suggestion.to_wire(),
                "graph": graph_to_snapshot(session.graph),
            }

    # -- read-only reports -----------------------------------------------------------

    @app.get("/v1/sessions/{session_id}/metrics")
    def metrics(session_id: str) -> dict[str, Any]:
        session = _get_session(session_id)
        events = store.load_events(session.id)
        return analytics.session_report(events, lexicon).to_json()

    @app.get("/v1/sessions/{session_id}/usage")
    def usage(session_id: str) -> dict[str, Any]:
        return ledger_report(_get_session(session_id).ledger)

    @app.get("/v1/sessions/{session_id}/export")
    def export_document(session_id: str, mode: str, format: str) -> Response:
        session = _get_session(session_id)
        try:
            if mode == "lesson_plan":
                payload = export.export_lesson_plan(
                    session.graph, format, title=session.task_label or "Lesson Plan"
                )
                media = "text/markdown" if format == "markdown" else "text/html"
            elif mode == "cards":
                payload = export.export_cards(
                    session.graph, format, session_label=session.task_label
                )
                media = "application/json" if format == "json" else "text/html"
            else:
                raise ApiError(400, "unsupported_mode", f"unsupported export mode {mode!r}")
        except export.UnsupportedFormatError as exc:
            raise _to_api_error(exc) from exc
        session.record_export(mode, format)
        return Response(content=payload, media_type=f"{media}; charset=utf-8")

    # -- hints ------------------------------------------------------------------------

    @app.get("/v1/hints")
    def list_hints(kind: Optional[str] = None) -> dict[str, Any]:
        node_kind = None
        if kind is not None:
            try:
                node_kind = parse_kind(kind)
            except InvalidKindError as exc:
                raise _to_api_error(exc) from exc
        return {
            "hints": [
                {
                    "kind": h.kind.value,
                    "category": h.category,
                    "title": h.title,
                    "description": h.description,
                }
                for h in hints.list(node_kind)
            ]
        }

    @app.get("/v1/health")
    def health() -> dict[str, str]:
        return {"status": "ok"}

    return app
