"""Shared builders: random graphs and randomly driven real sessions."""

import random
from pathlib import Path

from lessonmap import (
    AddAction,
    CreateEdgeAction,
    DesignGraph,
    ModifyAction,
    NodeKind,
    Provenance,
    RefineResult,
    SessionStore,
    SplitResult,
    apply_suggestion,
    make_suggestion,
    reject_suggestion,
)
from lessonmap.protocol import ProtocolError, ErrorCategory, SplitChild

DATA_DIR = Path(__file__).parent / "data"

KINDS = list(NodeKind)

NEGATIVE_WORDS = ["stuck", "confused", "can't", "lost", "frustrated"]
NEUTRAL_WORDS = [
    "please", "add", "an", "activity", "about", "rivers", "for", "my",
    "class", "next", "week", "thanks", "great", "unstuck", "confusedly",
]


def golden(name: str) -> str:
    return (DATA_DIR / name).read_text("utf-8")


def random_graph(rng: random.Random, max_nodes: int = 20, edge_prob: float = 0.15) -> DesignGraph:
    """A random graph with unique, equal-length node titles."""
    graph = DesignGraph()
    n_nodes = rng.randint(0, max_nodes)
    nodes = []
    for i in range(n_nodes):
        node = graph.add_node(
            rng.choice(KINDS),
            f"Card {i:03d}",
            f"<p>Body {i:03d}</p>",
            position=(rng.uniform(-2000, 2000), rng.uniform(-2000, 2000)),
        )
        nodes.append(node)
    for source in nodes:
        for target in nodes:
            if source.id != target.id and rng.random() < edge_prob:
                graph.create_edge(source.id, target.id)
    return graph


def random_chat_text(rng: random.Random) -> str:
    words = [
        rng.choice(NEGATIVE_WORDS) if rng.random() < 0.2 else rng.choice(NEUTRAL_WORDS)
        for _ in range(rng.randint(1, 12))
    ]
    return " ".join(words)


def _random_agent_suggestion(session, rng: random.Random):
    """Build a random but valid pending suggestion against the live graph."""
    graph = session.graph
    node_ids = sorted(graph.nodes)
    choice = rng.random()
    if choice < 0.5 or not node_ids:
        actions = []
        for _ in range(rng.randint(1, 3)):
            roll = rng.random()
            if roll < 0.6 or not node_ids:
                actions.append(
                    AddAction(
                        kind=rng.choice(KINDS),
                        title=f"Proposed {rng.randrange(10_000):04d}",
                        description="<p>Proposed body</p>",
                    )
                )
            elif roll < 0.85:
                actions.append(
                    ModifyAction(
                        card_id=rng.choice(node_ids),
                        description=f"<p>Updated {rng.randrange(10_000):04d}</p>",
                    )
                )
            elif len(node_ids) >= 2:
                source, target = rng.sample(node_ids, 2)
                actions.append(CreateEdgeAction(source_id=source, target_id=target))
            else:
                actions.append(AddAction(kind=rng.choice(KINDS), title="Fallback card"))
        return make_suggestion(Provenance.GLOBAL_AGENT, actions, "narration")
    if choice < 0.75:
        target = rng.choice(node_ids)
        node = graph.nodes[target]
        return make_suggestion(
            Provenance.REFINE_AGENT,
            RefineResult(
                node_id=target,
                title=node.title,
                description=f"<p>Refined {rng.randrange(10_000):04d}</p>",
                kind=node.kind,
            ),
            "refined",
        )
    target = rng.choice(node_ids)
    children = [
        SplitChild(
            title=f"Part {i} of {rng.randrange(1_000):03d}",
            description="<p>Part body</p>",
            kind=rng.choice(KINDS),
        )
        for i in range(rng.randint(2, 4))
    ]
    return make_suggestion(Provenance.SPLIT_AGENT, SplitResult(target, children), "split")


def drive_random_session(session, rng: random.Random, n_ops: int = 80) -> None:
    """Exercise every event kind via the real code paths, randomly."""
    graph = session.graph
    for _ in range(n_ops):
        node_ids = sorted(graph.nodes)
        edge_ids = sorted(graph.edges)
        op = rng.random()
        if op < 0.22:
            graph.add_node(
                rng.choice(KINDS),
                f"Card {rng.randrange(100_000):05d}",
                "<p>Hand-written body</p>",
                position=(rng.uniform(-1500, 1500), rng.uniform(-1500, 1500)),
            )
        elif op < 0.30 and node_ids:
            graph.set_position(
                rng.choice(node_ids), rng.uniform(-1500, 1500), rng.uniform(-1500, 1500)
            )
        elif op < 0.38 and node_ids:
            graph.modify_node(
                rng.choice(node_ids), new_description=f"<p>Edit {rng.randrange(1_000)}</p>"
            )
        elif op < 0.43 and node_ids:
            graph.delete_node(rng.choice(node_ids))
        elif op < 0.55 and len(node_ids) >= 2:
            source, target = rng.sample(node_ids, 2)
            graph.create_edge(source, target)
        elif op < 0.60 and edge_ids:
            graph.set_edge_label(rng.choice(edge_ids), f"label {rng.randrange(100)}")
        elif op < 0.64 and edge_ids:
            graph.delete_edge(rng.choice(edge_ids))
        elif op < 0.76:
            session.add_chat_turn("user", random_chat_text(rng))
            session.add_chat_turn("assistant", "Here is a thought.")
        elif op < 0.92:
            suggestion = _random_agent_suggestion(session, rng)
            session.offer_suggestion(suggestion)
            verdict = rng.random()
            if verdict < 0.3:
                reject_suggestion(graph, suggestion)
            else:
                count = suggestion.item_count()
                selection = None
                if verdict < 0.55 and count > 1 and not isinstance(
                    suggestion.payload, RefineResult
                ):
                    selection = sorted(
                        rng.sample(range(count), rng.randint(1, count - 1))
                    )
                apply_suggestion(graph, suggestion, selection)
            session.pending.pop(suggestion.id, None)
        elif op < 0.96:
            agent_nodes = [
                nid
                for nid in sorted(graph.nodes)
                if graph.nodes[nid].provenance is not Provenance.USER
            ]
            if agent_nodes:
                graph.modify_node(
                    rng.choice(agent_nodes),
                    new_title=f"User tweak {rng.randrange(1_000)}",
                )
        elif op < 0.98:
            session.record_export("lesson_plan", "markdown")
        else:
            session.record_protocol_error(
                ProtocolError(ErrorCategory.SYNTACTIC, "synthetic"), "global", 0
            )


def fresh_session(tmp_path, label: str = "Unit Test Session"):
    store = SessionStore(tmp_path / "store")
    return store, store.create_session(label)
