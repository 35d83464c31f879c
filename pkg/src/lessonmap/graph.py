"""Typed design graph for project-based learning plans.

The graph is the shared workspace: six pedagogical node kinds connected by
directed, labeled edges. Every mutation bumps a revision counter and reports
itself to an optional event sink, which is how the session layer builds its
append-only interaction log. ``created_at`` is a per-graph logical counter
(not wall clock) so that replaying a log reproduces the graph byte for byte.
"""

from __future__ import annotations

import json
import math
import uuid
from dataclasses import dataclass
from enum import Enum
from typing import Any, Callable, Optional

from .richtext import sanitize_description


class GraphError(Exception):
    """Base class for design-graph violations."""


class EmptyTitleError(GraphError):
    pass


class InvalidKindError(GraphError):
    pass


class UnknownNodeError(GraphError):
    pass


class UnknownEdgeError(GraphError):
    pass


class UnknownEndpointError(GraphError):
    pass


class SelfLoopError(GraphError):
    pass


class EmptyLabelError(GraphError):
    pass


class NodeKind(str, Enum):
    """The six building blocks of a lesson design."""

    LEARNER = "Learner"
    OBJECTIVE = "Objective"
    STRATEGY = "Strategy"
    ACTIVITY = "Activity"
    RESOURCE = "Resource"
    EVALUATION = "Evaluation"


# Wire-level spellings accepted for each kind. Agents and clients use both
# singular and plural card tags, and the evaluation kind also travels as
# "Assessment"; output is always the canonical singular NodeKind value.
_TAG_ALIASES: dict[str, NodeKind] = {}
for _kind, _extra in (
    (NodeKind.LEARNER, ("learners",)),
    (NodeKind.OBJECTIVE, ("objectives",)),
    (NodeKind.STRATEGY, ("strategies",)),
    (NodeKind.ACTIVITY, ("activities",)),
    (NodeKind.RESOURCE, ("resources",)),
    (NodeKind.EVALUATION, ("evaluations", "assessment", "assessments")),
):
    _TAG_ALIASES[_kind.value.lower()] = _kind
    for _alias in _extra:
        _TAG_ALIASES[_alias] = _kind


def parse_kind(tag: str) -> NodeKind:
    """Map a wire tag (any accepted spelling) to its NodeKind.

    Raises InvalidKindError for anything outside the closed six-kind set.
    """
    if isinstance(tag, NodeKind):
        return tag
    if isinstance(tag, str):
        kind = _TAG_ALIASES.get(tag.strip().lower())
        if kind is not None:
            return kind
    raise InvalidKindError(f"invalid tag {tag!r}: not one of the six card kinds")


class Provenance(str, Enum):
    """Who authored a node."""

    USER = "user"
    GLOBAL_AGENT = "global_agent"
    REFINE_AGENT = "refine_agent"
    SPLIT_AGENT = "split_agent"


AGENT_PROVENANCES = frozenset(
    {Provenance.GLOBAL_AGENT, Provenance.REFINE_AGENT, Provenance.SPLIT_AGENT}
)


@dataclass
class Node:
    id: str
    kind: NodeKind
    title: str
    description: str
    x: float
    y: float
    created_at: int
    provenance: Provenance

    def to_wire(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "tag": self.kind.value,
            "title": self.title,
            "description": self.description,
            "x": self.x,
            "y": self.y,
            "provenance": self.provenance.value,
            "created_at": self.created_at,
        }


@dataclass
class Edge:
    id: str
    source: str
    target: str
    label: str

    def to_wire(self) -> dict[str, Any]:
        return {"id": self.id, "source": self.source, "target": self.target, "label": self.label}


# Conventional relationship labels for specific directed kind pairs; every
# other ordered pair falls back to the generic label.
DEFAULT_EDGE_LABEL = "relates to"
_CONVENTIONAL_LABELS: dict[tuple[NodeKind, NodeKind], str] = {
    (NodeKind.RESOURCE, NodeKind.ACTIVITY): "supports",
    (NodeKind.OBJECTIVE, NodeKind.ACTIVITY): "guides",
    (NodeKind.EVALUATION, NodeKind.ACTIVITY): "measures",
}


def suggest_label(source_kind: NodeKind, target_kind: NodeKind) -> str:
    """Suggest a relationship label for a directed kind pair. Total over all 36 pairs."""
    return _CONVENTIONAL_LABELS.get((source_kind, target_kind), DEFAULT_EDGE_LABEL)


_MIN_SEPARATION_PX = 200.0
_SPIRAL_STEP_PX = 230.0
_GOLDEN_ANGLE = math.pi * (3.0 - math.sqrt(5.0))

EventSink = Callable[[str, str, dict], None]


def _fresh_id() -> str:
    return uuid.uuid4().hex


class DesignGraph:
    """Mutable design graph with referential integrity and event reporting.

    All mutations for one graph must come from a single writer (the owning
    session serializes them); reads of a snapshot are safe anywhere.
    """

    def __init__(self, on_event: Optional[EventSink] = None) -> None:
        self.nodes: dict[str, Node] = {}
        self.edges: dict[str, Edge] = {}
        self.revision = 0
        self._clock = 0
        self._on_event = on_event

    # -- events ---------------------------------------------------------

    def set_event_sink(self, on_event: Optional[EventSink]) -> None:
        self._on_event = on_event

    def emit(self, kind: str, actor: str, payload: dict) -> None:
        if self._on_event is not None:
            self._on_event(kind, actor, payload)

    # -- node operations -------------------------------------------------

    def add_node(
        self,
        kind: NodeKind,
        title: str,
        description: str = "",
        position: Optional[tuple[float, float]] = None,
        provenance: Provenance = Provenance.USER,
        *,
        node_id: Optional[str] = None,
        created_at: Optional[int] = None,
        actor: Optional[str] = None,
    ) -> Node:
        """Insert a node. Auto-places it when no position is given.

        ``node_id``/``created_at`` are for log replay only; normal callers
        leave them unset and get a fresh opaque id and the next logical tick.
        """
        kind = parse_kind(kind)
        if not title or not title.strip():
            raise EmptyTitleError("node title must be non-empty")
        if node_id is None:
            node_id = _fresh_id()
        elif node_id in self.nodes:
            raise GraphError(f"duplicate node id {node_id!r}")
        if position is None:
            x, y = self._auto_position()
        else:
            x, y = float(position[0]), float(position[1])
        if not (math.isfinite(x) and math.isfinite(y)):
            raise GraphError("node position must be finite")
        if created_at is None:
            created_at = self._clock
        self._clock = max(self._clock, created_at) + 1
        provenance = Provenance(provenance)
        node = Node(
            id=node_id,
            kind=kind,
            title=title,
            description=sanitize_description(description or ""),
            x=x,
            y=y,
            created_at=created_at,
            provenance=provenance,
        )
        self.nodes[node.id] = node
        self.revision += 1
        self.emit("node_added", actor or provenance.value, node.to_wire())
        return node

    def modify_node(
        self,
        node_id: str,
        new_title: Optional[str] = None,
        new_description: Optional[str] = None,
        new_kind: Optional[NodeKind] = None,
        *,
        actor: str = "user",
    ) -> Node:
        """Update only the supplied fields of an existing node."""
        node = self.nodes.get(node_id)
        if node is None:
            raise UnknownNodeError(f"unknown node id {node_id!r}")
        if new_title is not None and not new_title.strip():
            raise EmptyTitleError("node title must be non-empty")
        if new_kind is not None:
            new_kind = parse_kind(new_kind)
        changed: dict[str, Any] = {"id": node.id}
        if new_title is not None:
            node.title = new_title
            changed["title"] = new_title
        if new_description is not None:
            node.description = sanitize_description(new_description)
            changed["description"] = node.description
        if new_kind is not None:
            node.kind = new_kind
            changed["tag"] = new_kind.value
        self.revision += 1
        self.emit("node_modified", actor, changed)
        return node

    def set_position(self, node_id: str, x: float, y: float, *, actor: str = "user") -> Node:
        """Move a node on the canvas. Rides the node_modified event."""
        node = self.nodes.get(node_id)
        if node is None:
            raise UnknownNodeError(f"unknown node id {node_id!r}")
        x, y = float(x), float(y)
        if not (math.isfinite(x) and math.isfinite(y)):
            raise GraphError("node position must be finite")
        node.x, node.y = x, y
        self.revision += 1
        self.emit("node_modified", actor, {"id": node.id, "x": x, "y": y})
        return node

    def delete_node(self, node_id: str, *, actor: str = "user") -> list[str]:
        """Remove a node and all incident edges atomically; returns removed edge ids.

        One mutation, one event: the cascade is implied by the node removal
        and listed in the payload, so replaying the event reproduces it.
        """
        if node_id not in self.nodes:
            raise UnknownNodeError(f"unknown node id {node_id!r}")
        incident = sorted(
            e.id for e in self.edges.values() if node_id in (e.source, e.target)
        )
        for edge_id in incident:
            del self.edges[edge_id]
        del self.nodes[node_id]
        self.revision += 1
        self.emit("node_deleted", actor, {"id": node_id, "cascaded_edges": incident})
        return incident

    # -- edge operations --------------------------------------------------

    def create_edge(
        self,
        source_id: str,
        target_id: str,
        label: Optional[str] = None,
        *,
        edge_id: Optional[str] = None,
        actor: str = "user",
    ) -> Edge:
        source = self.nodes.get(source_id)
        target = self.nodes.get(target_id)
        if source is None or target is None:
            missing = source_id if source is None else target_id
            raise UnknownEndpointError(f"unknown endpoint {missing!r}")
        if source_id == target_id:
            raise SelfLoopError("self-loop edges are not allowed")
        if label is None or not label.strip():
            label = suggest_label(source.kind, target.kind)
        if edge_id is None:
            edge_id = _fresh_id()
        elif edge_id in self.edges:
            raise GraphError(f"duplicate edge id {edge_id!r}")
        edge = Edge(id=edge_id, source=source_id, target=target_id, label=label)
        self.edges[edge.id] = edge
        self.revision += 1
        self.emit("edge_created", actor, edge.to_wire())
        return edge

    def set_edge_label(self, edge_id: str, label: str, *, actor: str = "user") -> Edge:
        edge = self.edges.get(edge_id)
        if edge is None:
            raise UnknownEdgeError(f"unknown edge id {edge_id!r}")
        if not label or not label.strip():
            raise EmptyLabelError("edge label must be non-empty")
        edge.label = label
        self.revision += 1
        self.emit("edge_label_set", actor, {"id": edge.id, "label": label})
        return edge

    def delete_edge(self, edge_id: str, *, actor: str = "user") -> None:
        if edge_id not in self.edges:
            raise UnknownEdgeError(f"unknown edge id {edge_id!r}")
        del self.edges[edge_id]
        self.revision += 1
        self.emit("edge_deleted", actor, {"id": edge_id})

    # -- queries ----------------------------------------------------------

    def neighbors(self, node_id: str) -> list[Node]:
        """Distance-1 neighbors of a node, in creation order."""
        if node_id not in self.nodes:
            raise UnknownNodeError(f"unknown node id {node_id!r}")
        seen: dict[str, Node] = {}
        for edge in self.edges.values():
            if edge.source == node_id and edge.target not in seen:
                seen[edge.target] = self.nodes[edge.target]
            elif edge.target == node_id and edge.source not in seen:
                seen[edge.source] = self.nodes[edge.source]
        return sorted(seen.values(), key=lambda n: (n.created_at, n.id))

    def incident_edges(self, node_id: str) -> list[Edge]:
        if node_id not in self.nodes:
            raise UnknownNodeError(f"unknown node id {node_id!r}")
        return sorted(
            (e for e in self.edges.values() if node_id in (e.source, e.target)),
            key=lambda e: e.id,
        )

    def check_integrity(self) -> None:
        """Raise GraphError if any edge references a missing node."""
        for edge in self.edges.values():
            if edge.source not in self.nodes or edge.target not in self.nodes:
                raise GraphError(f"dangling edge {edge.id!r}")

    # -- placement ---------------------------------------------------------

    def _auto_position(self) -> tuple[float, float]:
        # Deterministic sunflower spiral around the centroid; first candidate
        # at least _MIN_SEPARATION_PX away from every existing node wins.
        if not self.nodes:
            return (0.0, 0.0)
        cx = sum(n.x for n in self.nodes.values()) / len(self.nodes)
        cy = sum(n.y for n in self.nodes.values()) / len(self.nodes)
        for k in range(100_000):
            r = _SPIRAL_STEP_PX * math.sqrt(k)
            theta = k * _GOLDEN_ANGLE
            x = cx + r * math.cos(theta)
            y = cy + r * math.sin(theta)
            if all(
                math.hypot(n.x - x, n.y - y) >= _MIN_SEPARATION_PX
                for n in self.nodes.values()
            ):
                return (x, y)
        raise GraphError("could not find a free canvas position")


# -- serialization ---------------------------------------------------------


def serialize_for_context(graph: DesignGraph) -> str:
    """Canonical text form of the whole graph, fed to agents as context.

    Pure function of graph state: nodes ordered by creation, edges by id,
    so state-equal graphs serialize to identical bytes.
    """
    nodes = sorted(graph.nodes.values(), key=lambda n: (n.created_at, n.id))
    edges = sorted(graph.edges.values(), key=lambda e: e.id)
    doc = {
        "nodes": [
            {"id": n.id, "tag": n.kind.value, "title": n.title, "description": n.description}
            for n in nodes
        ],
        "edges": [{"source": e.source, "target": e.target, "label": e.label} for e in edges],
    }
    return json.dumps(doc, ensure_ascii=False, indent=1)


def graph_to_snapshot(graph: DesignGraph) -> dict[str, Any]:
    """Graph snapshot in the JSON interchange shape."""
    nodes = sorted(graph.nodes.values(), key=lambda n: (n.created_at, n.id))
    edges = sorted(graph.edges.values(), key=lambda e: e.id)
    return {
        "nodes": [n.to_wire() for n in nodes],
        "edges": [e.to_wire() for e in edges],
        "revision": graph.revision,
    }


def graph_from_snapshot(snapshot: dict[str, Any]) -> DesignGraph:
    """Rebuild a graph from its interchange snapshot."""
    graph = DesignGraph()
    for raw in snapshot.get("nodes", []):
        graph.add_node(
            parse_kind(raw["tag"]),
            raw["title"],
            raw.get("description", ""),
            position=(raw.get("x", 0.0), raw.get("y", 0.0)),
            provenance=Provenance(raw.get("provenance", "user")),
            node_id=raw["id"],
            created_at=raw.get("created_at"),
        )
    for raw in snapshot.get("edges", []):
        graph.create_edge(raw["source"], raw["target"], raw["label"], edge_id=raw["id"])
    graph.revision = snapshot.get("revision", graph.revision)
    return graph
