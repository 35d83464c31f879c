import json
import random

import pytest

from conftest import drive_random_session, fresh_session
from lessonmap import (
    DesignGraph,
    NodeKind,
    Provenance,
    SessionStore,
    rebuild_chat,
    replay,
    serialize_for_context,
)
from lessonmap.store import (
    SCHEMA_VERSION,
    CorruptLogError,
    EventLog,
    LogEvent,
    StoreError,
    UnknownSessionError,
)

MUTATION_KINDS = {
    "node_added",
    "node_modified",
    "node_deleted",
    "edge_created",
    "edge_label_set",
    "edge_deleted",
}


# -- event log ------------------------------------------------------------------


def test_append_assigns_contiguous_seq(tmp_path):
    log = EventLog(tmp_path / "s.jsonl", "s")
    first = log.append("user", "chat_user", {"index": 0, "text": "hi"})
    second = log.append("user", "chat_user", {"index": 1, "text": "again"})
    assert (first.seq, second.seq) == (0, 1)


def test_append_durable_and_schema_versioned(tmp_path):
    path = tmp_path / "s.jsonl"
    log = EventLog(path, "s")
    log.append("user", "chat_user", {"index": 0, "text": "hi"})
    lines = path.read_text("utf-8").splitlines()
    assert len(lines) == 1
    record = json.loads(lines[0])
    assert set(record) == {
        "schema_version", "seq", "session_id", "ts", "actor", "kind", "payload",
    }
    assert record["schema_version"] == SCHEMA_VERSION


def test_append_continues_numbering_after_reopen(tmp_path):
    path = tmp_path / "s.jsonl"
    log = EventLog(path, "s")
    for i in range(5):
        log.append("user", "chat_user", {"index": i, "text": "x"})
    reopened = EventLog(path, "s")
    event = reopened.append("user", "chat_user", {"index": 5, "text": "y"})
    # Oracle: next seq equals the raw line count before the append.
    assert event.seq == 5
    assert len(path.read_text("utf-8").splitlines()) == 6


def test_append_rejects_unknown_kind_and_actor(tmp_path):
    log = EventLog(tmp_path / "s.jsonl", "s")
    with pytest.raises(StoreError):
        log.append("user", "node_teleported", {})
    with pytest.raises(StoreError):
        log.append("гость", "chat_user", {})


# -- replay ---------------------------------------------------------------------


def test_replay_empty_log_gives_empty_graph():
    graph = replay([])
    assert not graph.nodes and not graph.edges


def event(seq, kind, payload, actor="user"):
    return LogEvent(seq=seq, session_id="s", ts=0.0, actor=actor, kind=kind, payload=payload)


def test_replay_unknown_delete_is_corrupt():
    with pytest.raises(CorruptLogError):
        replay([event(0, "node_deleted", {"id": "ghost"})])


def test_replay_seq_gap_is_corrupt():
    events = [
        event(0, "chat_user", {"index": 0, "text": "a"}),
        event(2, "chat_user", {"index": 1, "text": "b"}),
    ]
    with pytest.raises(CorruptLogError):
        replay(events)


def test_replay_unknown_kind_is_corrupt():
    with pytest.raises(CorruptLogError):
        replay([event(0, "node_teleported", {})])


def test_replay_matches_live_graph(tmp_path):
    for seed in range(5):
        store, session = fresh_session(tmp_path / f"run{seed}")
        drive_random_session(session, random.Random(seed), n_ops=60)
        events = store.load_events(session.id)
        replayed = replay(events)
        assert serialize_for_context(replayed) == serialize_for_context(session.graph)
        assert replayed.revision == session.graph.revision


def test_replay_is_pure(tmp_path):
    store, session = fresh_session(tmp_path)
    drive_random_session(session, random.Random(99), n_ops=40)
    events = store.load_events(session.id)
    assert serialize_for_context(replay(events)) == serialize_for_context(replay(events))


# -- event-sourcing completeness -----------------------------------------------------


def test_every_mutation_emits_exactly_one_event(tmp_path):
    store, session = fresh_session(tmp_path)
    graph = session.graph
    a = graph.add_node(NodeKind.LEARNER, "A")
    b = graph.add_node(NodeKind.ACTIVITY, "B")
    edge = graph.create_edge(a.id, b.id)
    graph.set_edge_label(edge.id, "leads to")
    graph.modify_node(a.id, new_title="A2")
    graph.set_position(b.id, 5, 5)
    graph.delete_edge(edge.id)
    graph.delete_node(b.id)
    mutations = 8
    events = store.load_events(session.id)
    assert sum(1 for e in events if e.kind in MUTATION_KINDS) == mutations
    assert session.graph.revision == mutations


def test_delete_node_event_carries_cascade(tmp_path):
    store, session = fresh_session(tmp_path)
    graph = session.graph
    a = graph.add_node(NodeKind.LEARNER, "A")
    b = graph.add_node(NodeKind.ACTIVITY, "B")
    edge = graph.create_edge(a.id, b.id)
    graph.delete_node(a.id)
    deleted = [e for e in store.load_events(session.id) if e.kind == "node_deleted"]
    assert deleted[0].payload["cascaded_edges"] == [edge.id]


# -- post-acceptance edit tracking ------------------------------------------------------


def agent_node(graph):
    return graph.add_node(
        NodeKind.ACTIVITY, "Proposed", provenance=Provenance.GLOBAL_AGENT,
        actor="global_agent",
    )


def edits_of(store, session):
    return [e for e in store.load_events(session.id) if e.kind == "post_acceptance_edit"]


def test_user_content_edit_of_agent_node_logs_edit(tmp_path):
    store, session = fresh_session(tmp_path)
    node = agent_node(session.graph)
    session.graph.modify_node(node.id, new_title="Tweaked")
    events = edits_of(store, session)
    assert len(events) == 1
    assert events[0].payload == {"id": node.id}
    assert events[0].actor == "user"


def test_drag_of_agent_node_is_not_an_edit(tmp_path):
    store, session = fresh_session(tmp_path)
    node = agent_node(session.graph)
    session.graph.set_position(node.id, 100, 100)
    assert edits_of(store, session) == []


def test_user_edit_of_own_node_is_not_tracked(tmp_path):
    store, session = fresh_session(tmp_path)
    node = session.graph.add_node(NodeKind.ACTIVITY, "Mine")
    session.graph.modify_node(node.id, new_title="Mine 2")
    assert edits_of(store, session) == []


def test_agent_modification_is_not_a_user_edit(tmp_path):
    store, session = fresh_session(tmp_path)
    node = agent_node(session.graph)
    session.graph.modify_node(node.id, new_description="<p>agent</p>", actor="refine_agent")
    assert edits_of(store, session) == []


# -- chat -------------------------------------------------------------------------------


def test_chat_turns_logged_and_rebuilt(tmp_path):
    store, session = fresh_session(tmp_path)
    session.add_chat_turn("user", "hello")
    session.add_chat_turn("assistant", "hi there")
    session.add_chat_turn("user", "more")
    events = store.load_events(session.id)
    rebuilt = rebuild_chat(events)
    assert [(t.index, t.author, t.text) for t in rebuilt] == [
        (0, "user", "hello"),
        (1, "assistant", "hi there"),
        (2, "user", "more"),
    ]
    with pytest.raises(StoreError):
        session.add_chat_turn("narrator", "nope")


# -- session store ------------------------------------------------------------------------


def test_list_reflects_creates(tmp_path):
    store = SessionStore(tmp_path)
    ids = {store.create_session(f"s{i}").id for i in range(3)}
    listed = store.list_sessions()
    assert {entry["id"] for entry in listed} == ids
    assert all(set(entry) >= {"id", "task_label", "created_at", "path"} for entry in listed)


def test_get_unknown_session(tmp_path):
    store = SessionStore(tmp_path)
    with pytest.raises(UnknownSessionError):
        store.get_session("nope")
    with pytest.raises(UnknownSessionError):
        store.load_events("nope")


def test_save_load_round_trip(tmp_path):
    store = SessionStore(tmp_path)
    session = store.create_session("Round Trip")
    drive_random_session(session, random.Random(5), n_ops=50)
    live_serial = serialize_for_context(session.graph)
    live_chat = [(t.author, t.text) for t in session.chat]

    reopened = SessionStore(tmp_path)
    loaded = reopened.get_session(session.id)
    assert loaded.task_label == "Round Trip"
    assert serialize_for_context(loaded.graph) == live_serial
    assert [(t.author, t.text) for t in loaded.chat] == live_chat


def test_loaded_session_keeps_logging_with_continued_seq(tmp_path):
    store = SessionStore(tmp_path)
    session = store.create_session("Continue")
    session.graph.add_node(NodeKind.LEARNER, "A")
    count_before = len(store.load_events(session.id))

    reopened = SessionStore(tmp_path)
    loaded = reopened.get_session(session.id)
    loaded.graph.add_node(NodeKind.ACTIVITY, "B")
    events = reopened.load_events(session.id)
    assert len(events) == count_before + 1
    assert [e.seq for e in events] == list(range(len(events)))
    assert serialize_for_context(replay(events)) == serialize_for_context(loaded.graph)
