"""Session persistence: append-only event logs and deterministic replay.

Each session owns one JSON-lines file of interaction events plus an entry in
a session index document. Events are never mutated or deleted; the graph and
chat transcript are rebuilt from the log on load. Replay keys on the ``seq``
counter only, so wall-clock skew cannot corrupt analysis.
"""

from __future__ import annotations

import json
import os
import threading
import time
import uuid
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Iterable, Optional, Sequence, Union

from .agents import UsageLedger
from .graph import AGENT_PROVENANCES, DesignGraph, GraphError, Provenance
from .protocol import PendingSuggestion, ProtocolError

SCHEMA_VERSION = 1

EVENT_KINDS = frozenset(
    {
        "node_added",
        "node_modified",
        "node_deleted",
        "edge_created",
        "edge_label_set",
        "edge_deleted",
        "chat_user",
        "chat_assistant",
        "suggestion_offered",
        "suggestion_accepted",
        "suggestion_rejected",
        "post_acceptance_edit",
        "export_requested",
        "protocol_error",
    }
)

ACTORS = frozenset({"user", "global_agent", "refine_agent", "split_agent", "system"})


class StoreError(Exception):
    pass


class UnknownSessionError(StoreError):
    pass


class StorageFailureError(StoreError):
    pass


class CorruptLogError(StoreError):
    pass


@dataclass(frozen=True)
class LogEvent:
    seq: int
    session_id: str
    ts: float
    actor: str
    kind: str
    payload: dict[str, Any]

    def to_json(self) -> dict[str, Any]:
        return {
            "schema_version": SCHEMA_VERSION,
            "seq": self.seq,
            "session_id": self.session_id,
            "ts": self.ts,
            "actor": self.actor,
            "kind": self.kind,
            "payload": self.payload,
        }

    @staticmethod
    def from_json(raw: dict[str, Any]) -> "LogEvent":
        try:
            return LogEvent(
                seq=int(raw["seq"]),
                session_id=str(raw["session_id"]),
                ts=float(raw["ts"]),
                actor=str(raw["actor"]),
                kind=str(raw["kind"]),
                payload=dict(raw["payload"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise CorruptLogError(f"malformed event record: {exc}") from exc


@dataclass
class ChatTurn:
    index: int
    author: str  # "user" | "assistant"
    text: str
    timestamp: float


class EventLog:
    """Append-only JSON-lines event file for one session."""

    def __init__(self, path: Union[str, Path], session_id: str) -> None:
        self.path = Path(path)
        self.session_id = session_id
        self._next_seq = 0
        if self.path.exists():
            events = self.read_all()
            if events:
                self._next_seq = events[-1].seq + 1

    def append(self, actor: str, kind: str, payload: dict[str, Any]) -> LogEvent:
        if kind not in EVENT_KINDS:
            raise StoreError(f"unknown event kind {kind!r}")
        if actor not in ACTORS:
            raise StoreError(f"unknown actor {actor!r}")
        event = LogEvent(
            seq=self._next_seq,
            session_id=self.session_id,
            ts=time.time(),
            actor=actor,
            kind=kind,
            payload=payload,
        )
        line = json.dumps(event.to_json(), ensure_ascii=False)
        try:
            with open(self.path, "a", encoding="utf-8") as handle:
                handle.write(line + "\n")
                handle.flush()
                os.fsync(handle.fileno())
        except OSError as exc:
            raise StorageFailureError(str(exc)) from exc
        self._next_seq += 1
        return event

    def read_all(self) -> list[LogEvent]:
        if not self.path.exists():
            return []
        events: list[LogEvent] = []
        try:
            text = self.path.read_text("utf-8")
        except OSError as exc:
            raise StorageFailureError(str(exc)) from exc
        for lineno, line in enumerate(text.splitlines()):
            if not line.strip():
                continue
            try:
                raw = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorruptLogError(f"line {lineno}: invalid JSON") from exc
            events.append(LogEvent.from_json(raw))
        return events


def replay(
    events: Iterable[LogEvent],
    after_each: Optional[Callable[[DesignGraph, LogEvent], None]] = None,
) -> DesignGraph:
    """Fold a seq-ordered event stream into a fresh graph.

    Pure function of the stream: resulting graph is state-equal to the live
    graph at the last seq. Raises CorruptLogError on seq gaps, unknown event
    kinds, or references to missing nodes/edges. ``after_each`` observes the
    intermediate graph after every folded event (prefix states).
    """
    graph = DesignGraph()
    expected_seq = 0
    for event in events:
        if event.seq != expected_seq:
            raise CorruptLogError(f"seq gap: expected {expected_seq}, got {event.seq}")
        expected_seq += 1
        if event.kind not in EVENT_KINDS:
            raise CorruptLogError(f"unknown event kind {event.kind!r}")
        payload = event.payload
        try:
            if event.kind == "node_added":
                graph.add_node(
                    payload["tag"],
                    payload["title"],
                    payload.get("description", ""),
                    position=(payload["x"], payload["y"]),
                    provenance=Provenance(payload.get("provenance", "user")),
                    node_id=payload["id"],
                    created_at=payload.get("created_at"),
                )
            elif event.kind == "node_modified":
                if "x" in payload or "y" in payload:
                    graph.set_position(payload["id"], payload["x"], payload["y"])
                content = {
                    key: payload[key] for key in ("title", "description", "tag") if key in payload
                }
                if content:
                    graph.modify_node(
                        payload["id"],
                        new_title=content.get("title"),
                        new_description=content.get("description"),
                        new_kind=content.get("tag"),
                    )
            elif event.kind == "node_deleted":
                graph.delete_node(payload["id"])
            elif event.kind == "edge_created":
                graph.create_edge(
                    payload["source"],
                    payload["target"],
                    payload["label"],
                    edge_id=payload["id"],
                )
            elif event.kind == "edge_label_set":
                graph.set_edge_label(payload["id"], payload["label"])
            elif event.kind == "edge_deleted":
                graph.delete_edge(payload["id"])
            # Chat, suggestion, export, and error events carry no graph state.
        except (GraphError, KeyError) as exc:
            raise CorruptLogError(f"seq {event.seq}: {exc}") from exc
        if after_each is not None:
            after_each(graph, event)
    return graph


def rebuild_chat(events: Iterable[LogEvent]) -> list[ChatTurn]:
    turns: list[ChatTurn] = []
    for event in events:
        if event.kind not in ("chat_user", "chat_assistant"):
            continue
        author = "user" if event.kind == "chat_user" else "assistant"
        turns.append(
            ChatTurn(
                index=len(turns),
                author=author,
                text=event.payload.get("text", ""),
                timestamp=event.ts,
            )
        )
    return turns


class Session:
    """One design session: live graph, transcript, ledger, pending reviews.

    All graph mutations flow through ``graph``, whose event sink appends to
    this session's log; user edits of agent-authored node content
    additionally log a post_acceptance_edit event. Mutations and agent calls
    are serialized by ``lock``; at most one agent call may be in flight.
    """

    def __init__(
        self,
        session_id: str,
        task_label: str,
        created_at: float,
        log: EventLog,
        graph: Optional[DesignGraph] = None,
        chat: Optional[list[ChatTurn]] = None,
    ) -> None:
        self.id = session_id
        self.task_label = task_label
        self.created_at = created_at
        self.log = log
        self.chat: list[ChatTurn] = chat if chat is not None else []
        self.ledger = UsageLedger()
        self.pending: dict[str, PendingSuggestion] = {}
        self.lock = threading.RLock()
        self._agent_inflight = False
        if graph is None:
            graph = DesignGraph()
        self.graph = graph
        self.graph.set_event_sink(self._record)

    # -- event plumbing ---------------------------------------------------

    def _record(self, kind: str, actor: str, payload: dict[str, Any]) -> None:
        is_agent_authored = (
            kind == "node_modified"
            and actor == "user"
            and any(key in payload for key in ("title", "description", "tag"))
            and payload.get("id") in self.graph.nodes
            and self.graph.nodes[payload["id"]].provenance in AGENT_PROVENANCES
        )
        self.log.append(actor, kind, payload)
        if is_agent_authored:
            self.log.append("user", "post_acceptance_edit", {"id": payload["id"]})

    # -- chat --------------------------------------------------------------

    def add_chat_turn(self, author: str, text: str) -> ChatTurn:
        if author not in ("user", "assistant"):
            raise StoreError(f"unknown chat author {author!r}")
        turn = ChatTurn(index=len(self.chat), author=author, text=text, timestamp=time.time())
        self.chat.append(turn)
        kind = "chat_user" if author == "user" else "chat_assistant"
        actor = "user" if author == "user" else "global_agent"
        self.log.append(actor, kind, {"index": turn.index, "text": text})
        return turn

    # -- suggestions ---------------------------------------------------------

    def offer_suggestion(self, suggestion: PendingSuggestion) -> None:
        self.pending[suggestion.id] = suggestion
        self.log.append(
            suggestion.origin.value,
            "suggestion_offered",
            {
                "suggestion_id": suggestion.id,
                "origin": suggestion.origin.value,
                "item_count": suggestion.item_count(),
                "payload": suggestion.payload_to_wire(),
            },
        )

    def record_protocol_error(self, error: ProtocolError, agent: str, attempt: int) -> None:
        self.log.append(
            "system",
            "protocol_error",
            {"category": error.category.value, "detail": error.detail, "agent": agent,
             "attempt": attempt},
        )

    def record_export(self, mode: str, fmt: str) -> None:
        self.log.append("user", "export_requested", {"mode": mode, "format": fmt})

    # -- agent single-flight ---------------------------------------------------

    def begin_agent_call(self) -> bool:
        """Try to claim the single agent-call slot; False when already busy."""
        with self.lock:
            if self._agent_inflight:
                return False
            self._agent_inflight = True
            return True

    def end_agent_call(self) -> None:
        with self.lock:
            self._agent_inflight = False


class SessionStore:
    """Directory-backed collection of sessions with a JSON index."""

    def __init__(self, root: Union[str, Path]) -> None:
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        (self.root / "events").mkdir(exist_ok=True)
        self._index_path = self.root / "index.json"
        self._index: list[dict[str, Any]] = []
        self._live: dict[str, Session] = {}
        self._lock = threading.Lock()
        if self._index_path.exists():
            try:
                doc = json.loads(self._index_path.read_text("utf-8"))
            except (OSError, json.JSONDecodeError) as exc:
                raise StorageFailureError(f"unreadable session index: {exc}") from exc
            self._index = list(doc.get("sessions", []))

    def _flush_index(self) -> None:
        doc = {"schema_version": SCHEMA_VERSION, "sessions": self._index}
        tmp = self._index_path.with_suffix(".json.tmp")
        try:
            tmp.write_text(json.dumps(doc, ensure_ascii=False, indent=1), "utf-8")
            tmp.replace(self._index_path)
        except OSError as exc:
            raise StorageFailureError(str(exc)) from exc

    def _event_path(self, session_id: str) -> Path:
        return self.root / "events" / f"{session_id}.jsonl"

    def create_session(self, task_label: str = "") -> Session:
        with self._lock:
            session_id = uuid.uuid4().hex
            created_at = time.time()
            log = EventLog(self._event_path(session_id), session_id)
            session = Session(session_id, task_label, created_at, log)
            self._index.append(
                {
                    "id": session_id,
                    "task_label": task_label,
                    "created_at": created_at,
                    "path": str(self._event_path(session_id).relative_to(self.root)),
                }
            )
            self._flush_index()
            self._live[session_id] = session
            return session

    def _index_entry(self, session_id: str) -> dict[str, Any]:
        for entry in self._index:
            if entry["id"] == session_id:
                return entry
        raise UnknownSessionError(f"unknown session {session_id!r}")

    def get_session(self, session_id: str) -> Session:
        """Live session if open, else rebuild graph and chat from the log."""
        with self._lock:
            if session_id in self._live:
                return self._live[session_id]
            entry = self._index_entry(session_id)
            log = EventLog(self._event_path(session_id), session_id)
            events = log.read_all()
            graph = replay(events)
            chat = rebuild_chat(events)
            session = Session(
                session_id,
                entry.get("task_label", ""),
                float(entry.get("created_at", 0.0)),
                log,
                graph=graph,
                chat=chat,
            )
            self._live[session_id] = session
            return session

    def list_sessions(self) -> list[dict[str, Any]]:
        with self._lock:
            return [dict(entry) for entry in self._index]

    def load_events(self, session_id: str) -> list[LogEvent]:
        with self._lock:
            self._index_entry(session_id)
        return EventLog(self._event_path(session_id), session_id).read_all()
