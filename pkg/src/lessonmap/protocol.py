"""Parsing and application of agent-proposed graph actions.

Agent replies are prose with embedded JSON blocks. This module finds those
blocks, validates them against the schema and the current graph, classifies
failures, and applies accepted suggestions transactionally (validate first,
then mutate, so the graph is never left half-updated).

Failure taxonomy:
  * syntactic: a block was indicated but could not be parsed as JSON;
  * structural_violation: well-formed JSON that breaks schema or referential
    rules (bad tag, missing field, unknown card id);
  * semantic_contextual: reserved for outside judges (e.g. a human rater);
    the code never assigns it automatically.
"""

from __future__ import annotations

import json
import re
import time
import uuid
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Optional, Sequence, Union

from .graph import (
    DesignGraph,
    GraphError,
    InvalidKindError,
    NodeKind,
    Provenance,
    UnknownNodeError,
    parse_kind,
)

_MARKERS = ("actions", "new_node", "old_node_id")


class ErrorCategory(str, Enum):
    SYNTACTIC = "syntactic"
    STRUCTURAL_VIOLATION = "structural_violation"
    SEMANTIC_CONTEXTUAL = "semantic_contextual"


@dataclass
class ProtocolError:
    """A classified parse/validation failure, returned (not raised) by parsers."""

    category: ErrorCategory
    detail: str
    raw_payload: str = ""

    def to_wire(self) -> dict[str, str]:
        return {"category": self.category.value, "detail": self.detail}


def _syntactic(detail: str, raw: str = "") -> ProtocolError:
    return ProtocolError(ErrorCategory.SYNTACTIC, detail, raw)


def _structural(detail: str, raw: str = "") -> ProtocolError:
    return ProtocolError(ErrorCategory.STRUCTURAL_VIOLATION, detail, raw)


# -- action variants ---------------------------------------------------------


@dataclass
class AddAction:
    kind: NodeKind
    title: str
    description: str = ""

    option = "add"

    def to_wire(self) -> dict[str, Any]:
        return {
            "option": "add",
            "type": self.kind.value,
            "title": self.title,
            "description": self.description,
        }


@dataclass
class ModifyAction:
    card_id: str
    kind: Optional[NodeKind] = None
    title: Optional[str] = None
    description: Optional[str] = None

    option = "modify"

    def to_wire(self) -> dict[str, Any]:
        wire: dict[str, Any] = {"option": "modify", "card_id": self.card_id}
        if self.kind is not None:
            wire["type"] = self.kind.value
        if self.title is not None:
            wire["title"] = self.title
        if self.description is not None:
            wire["description"] = self.description
        return wire


@dataclass
class CreateEdgeAction:
    source_id: str
    target_id: str
    label: Optional[str] = None

    option = "create_edge"

    def to_wire(self) -> dict[str, Any]:
        wire: dict[str, Any] = {
            "option": "create_edge",
            "source_id": self.source_id,
            "target_id": self.target_id,
        }
        if self.label is not None:
            wire["label"] = self.label
        return wire


AgentAction = Union[AddAction, ModifyAction, CreateEdgeAction]


@dataclass
class RefineResult:
    node_id: str
    title: str
    description: str
    kind: NodeKind

    def to_wire(self) -> dict[str, Any]:
        return {
            "new_node": {
                "id": self.node_id,
                "title": self.title,
                "description": self.description,
                "tag": self.kind.value,
            }
        }


@dataclass
class SplitChild:
    title: str
    description: str
    kind: NodeKind

    def to_wire(self) -> dict[str, Any]:
        return {"title": self.title, "description": self.description, "tag": self.kind.value}


@dataclass
class SplitResult:
    old_node_id: str
    new_nodes: list[SplitChild]

    def to_wire(self) -> dict[str, Any]:
        return {
            "old_node_id": self.old_node_id,
            "new_nodes": [child.to_wire() for child in self.new_nodes],
        }


# -- JSON block discovery -----------------------------------------------------


@dataclass
class _Region:
    start: int
    end: int
    obj: Optional[dict]  # None when the region failed to parse
    raw: str


def _balanced_end(text: str, start: int) -> int:
    """Index one past the brace-balanced region opening at ``start``.

    Tracks JSON string literals so braces inside strings are ignored.
    Returns len(text) if the region never closes.
    """
    depth = 0
    in_string = False
    escaped = False
    for i in range(start, len(text)):
        ch = text[i]
        if in_string:
            if escaped:
                escaped = False
            elif ch == "\\":
                escaped = True
            elif ch == '"':
                in_string = False
            continue
        if ch == '"':
            in_string = True
        elif ch == "{":
            depth += 1
        elif ch == "}":
            depth -= 1
            if depth == 0:
                return i + 1
    return len(text)


def find_json_regions(text: str) -> list[_Region]:
    """All top-level {...} regions in document order, parsed where possible."""
    decoder = json.JSONDecoder()
    regions: list[_Region] = []
    i = 0
    while True:
        i = text.find("{", i)
        if i < 0:
            break
        try:
            obj, end = decoder.raw_decode(text, i)
        except json.JSONDecodeError:
            end = _balanced_end(text, i)
            regions.append(_Region(i, end, None, text[i:end]))
        else:
            if isinstance(obj, dict):
                regions.append(_Region(i, end, obj, text[i:end]))
            # Non-dict top-level values are not action blocks; skip them.
        i = end
    return regions


def _mentions_marker(raw: str) -> bool:
    return any(marker in raw for marker in _MARKERS)


_FENCE_LINE = re.compile(r"^```[\w-]*$")


def strip_json_blocks(text: str) -> str:
    """The conversational narration: input text minus its JSON blocks.

    Code-fence marker lines left orphaned by block removal are dropped,
    and runs of blank lines are collapsed.
    """
    spans: list[tuple[int, int]] = []
    for region in find_json_regions(text):
        if region.obj is None and not _mentions_marker(region.raw):
            continue
        spans.append((region.start, region.end))
    out: list[str] = []
    cursor = 0
    for start, end in spans:
        out.append(text[cursor:start])
        cursor = end
    out.append(text[cursor:])
    narration = "".join(out)
    cleaned: list[str] = []
    for line in narration.splitlines():
        line = line.rstrip()
        if spans and _FENCE_LINE.match(line.strip()):
            continue
        if line or (cleaned and cleaned[-1]):
            cleaned.append(line)
    return "\n".join(cleaned).strip()


# -- block validation ----------------------------------------------------------


def _validate_action(raw: Any, graph: Optional[DesignGraph]) -> Union[AgentAction, ProtocolError]:
    if not isinstance(raw, dict):
        return _structural("each action must be a JSON object", json.dumps(raw))
    payload = json.dumps(raw, ensure_ascii=False)
    option = raw.get("option")
    if option is None:
        return _structural("missing field: option", payload)
    if option == "add":
        if "type" not in raw:
            return _structural("add action missing field: type", payload)
        try:
            kind = parse_kind(raw["type"])
        except InvalidKindError:
            return _structural(f"invalid tag: {raw['type']!r}", payload)
        title = raw.get("title")
        if not isinstance(title, str) or not title.strip():
            return _structural("add action requires a non-empty title", payload)
        description = raw.get("description", "")
        if not isinstance(description, str):
            return _structural("description must be a string", payload)
        return AddAction(kind=kind, title=title, description=description)
    if option == "modify":
        card_id = raw.get("card_id")
        if card_id is None:
            return _structural("modify action missing field: card_id", payload)
        card_id = str(card_id)
        if graph is not None and card_id not in graph.nodes:
            return _structural(f"unknown card_id: {card_id!r}", payload)
        kind: Optional[NodeKind] = None
        if "type" in raw:
            try:
                kind = parse_kind(raw["type"])
            except InvalidKindError:
                return _structural(f"invalid tag: {raw['type']!r}", payload)
        title = raw.get("title")
        if title is not None and (not isinstance(title, str) or not title.strip()):
            return _structural("modify title must be a non-empty string", payload)
        description = raw.get("description")
        if description is not None and not isinstance(description, str):
            return _structural("description must be a string", payload)
        return ModifyAction(card_id=card_id, kind=kind, title=title, description=description)
    if option == "create_edge":
        source_id = raw.get("source_id")
        target_id = raw.get("target_id")
        if source_id is None or target_id is None:
            return _structural("create_edge requires source_id and target_id", payload)
        source_id, target_id = str(source_id), str(target_id)
        if graph is not None:
            if source_id not in graph.nodes:
                return _structural(f"unknown source_id: {source_id!r}", payload)
            if target_id not in graph.nodes:
                return _structural(f"unknown target_id: {target_id!r}", payload)
        if source_id == target_id:
            return _structural("create_edge endpoints must differ", payload)
        label = raw.get("label")
        if label is not None and not isinstance(label, str):
            return _structural("edge label must be a string", payload)
        return CreateEdgeAction(source_id=source_id, target_id=target_id, label=label)
    return _structural(f"unknown option: {option!r}", payload)


def extract_actions(
    agent_text: str, graph: Optional[DesignGraph] = None
) -> Union[list[AgentAction], ProtocolError]:
    """Collect validated actions from every action block, in document order.

    A response with no blocks at all is a valid empty list (the agent may
    simply converse). The first failure wins and nothing is applied.
    """
    actions: list[AgentAction] = []
    for region in find_json_regions(agent_text):
        if region.obj is None:
            if _mentions_marker(region.raw):
                return _syntactic("unparseable JSON block", region.raw)
            continue
        if "actions" not in region.obj:
            continue
        block_actions = region.obj["actions"]
        if not isinstance(block_actions, list):
            return _structural("actions field must be an array", region.raw)
        for raw_action in block_actions:
            result = _validate_action(raw_action, graph)
            if isinstance(result, ProtocolError):
                return result
            actions.append(result)
    return actions


def _single_object(agent_text: str) -> Union[dict, ProtocolError]:
    regions = find_json_regions(agent_text)
    parsed = [r for r in regions if r.obj is not None]
    broken = [r for r in regions if r.obj is None and _mentions_marker(r.raw)]
    if broken:
        return _syntactic("unparseable JSON block", broken[0].raw)
    if not parsed:
        return _syntactic("no JSON object found", agent_text)
    if len(parsed) > 1:
        return _structural("expected exactly one JSON object", agent_text)
    return parsed[0].obj


def parse_refine(agent_text: str, target_node_id: str) -> Union[RefineResult, ProtocolError]:
    """Parse a refine reply: one object, one new_node, id matching the target."""
    obj = _single_object(agent_text)
    if isinstance(obj, ProtocolError):
        return obj
    payload = json.dumps(obj, ensure_ascii=False)
    new_node = obj.get("new_node")
    if not isinstance(new_node, dict):
        return _structural("missing field: new_node", payload)
    node_id = new_node.get("id")
    if node_id is None:
        return _structural("new_node missing field: id", payload)
    if str(node_id) != str(target_node_id):
        return _structural(
            f"new_node id {node_id!r} does not match refined node {target_node_id!r}", payload
        )
    title = new_node.get("title")
    if not isinstance(title, str) or not title.strip():
        return _structural("new_node requires a non-empty title", payload)
    description = new_node.get("description", "")
    if not isinstance(description, str):
        return _structural("description must be a string", payload)
    if "tag" not in new_node:
        return _structural("new_node missing field: tag", payload)
    try:
        kind = parse_kind(new_node["tag"])
    except InvalidKindError:
        return _structural(f"invalid tag: {new_node['tag']!r}", payload)
    return RefineResult(node_id=str(node_id), title=title, description=description, kind=kind)


def parse_split(agent_text: str, target_node_id: str) -> Union[SplitResult, ProtocolError]:
    """Parse a split reply: one object with old_node_id and 2+ tagged children."""
    obj = _single_object(agent_text)
    if isinstance(obj, ProtocolError):
        return obj
    payload = json.dumps(obj, ensure_ascii=False)
    old_node_id = obj.get("old_node_id")
    if old_node_id is None:
        return _structural("missing field: old_node_id", payload)
    if str(old_node_id) != str(target_node_id):
        return _structural(
            f"old_node_id {old_node_id!r} does not match split node {target_node_id!r}", payload
        )
    new_nodes = obj.get("new_nodes")
    if not isinstance(new_nodes, list):
        return _structural("missing field: new_nodes", payload)
    if len(new_nodes) < 2:
        return _structural("a split must produce at least two new cards", payload)
    children: list[SplitChild] = []
    for raw in new_nodes:
        if not isinstance(raw, dict):
            return _structural("each new card must be a JSON object", payload)
        title = raw.get("title")
        if not isinstance(title, str) or not title.strip():
            return _structural("new card requires a non-empty title", payload)
        description = raw.get("description", "")
        if not isinstance(description, str):
            return _structural("description must be a string", payload)
        if "tag" not in raw:
            return _structural("new card missing field: tag", payload)
        try:
            kind = parse_kind(raw["tag"])
        except InvalidKindError:
            return _structural(f"invalid tag: {raw['tag']!r}", payload)
        children.append(SplitChild(title=title, description=description, kind=kind))
    return SplitResult(old_node_id=str(old_node_id), new_nodes=children)


# -- suggestion lifecycle --------------------------------------------------------


class SuggestionStatus(str, Enum):
    PENDING = "pending"
    ACCEPTED = "accepted"
    PARTIALLY_ACCEPTED = "partially_accepted"
    REJECTED = "rejected"


class SuggestionError(GraphError):
    pass


class AlreadyResolvedError(SuggestionError):
    pass


class InvalidSelectionError(SuggestionError):
    pass


SuggestionPayload = Union[list, RefineResult, SplitResult]


@dataclass
class PendingSuggestion:
    """A reviewable agent proposal awaiting the user's verdict."""

    id: str
    origin: Provenance
    payload: SuggestionPayload
    narration: str
    status: SuggestionStatus = SuggestionStatus.PENDING
    created_at: float = field(default_factory=time.time)
    resolution_reason: Optional[str] = None

    def payload_to_wire(self) -> dict[str, Any]:
        if isinstance(self.payload, RefineResult):
            return self.payload.to_wire()
        if isinstance(self.payload, SplitResult):
            return self.payload.to_wire()
        return {"actions": [action.to_wire() for action in self.payload]}

    def to_wire(self) -> dict[str, Any]:
        wire = {
            "id": self.id,
            "origin": self.origin.value,
            "status": self.status.value,
            "narration": self.narration,
            "created_at": self.created_at,
        }
        wire.update(self.payload_to_wire())
        return wire

    def item_count(self) -> int:
        """How many independently selectable items the suggestion carries."""
        if isinstance(self.payload, RefineResult):
            return 1
        if isinstance(self.payload, SplitResult):
            return len(self.payload.new_nodes)
        return len(self.payload)


def make_suggestion(
    origin: Provenance, payload: SuggestionPayload, narration: str = ""
) -> PendingSuggestion:
    return PendingSuggestion(
        id=uuid.uuid4().hex, origin=Provenance(origin), payload=payload, narration=narration
    )


def _normalize_selection(
    selection: Optional[Sequence[int]], count: int
) -> list[int]:
    if selection is None:
        return list(range(count))
    indices = sorted(set(int(i) for i in selection))
    if not indices:
        raise InvalidSelectionError("selection must not be empty")
    if indices[0] < 0 or indices[-1] >= count:
        raise InvalidSelectionError(f"selection out of range for {count} items")
    return indices


def _invalidate(graph: DesignGraph, suggestion: PendingSuggestion, reason: str) -> None:
    suggestion.status = SuggestionStatus.REJECTED
    suggestion.resolution_reason = reason
    graph.emit(
        "suggestion_rejected",
        "user",
        {"suggestion_id": suggestion.id, "origin": suggestion.origin.value, "reason": reason},
    )


def reject_suggestion(
    graph: DesignGraph, suggestion: PendingSuggestion, reason: str = "rejected by user"
) -> None:
    """Resolve a pending suggestion without touching the graph."""
    if suggestion.status is not SuggestionStatus.PENDING:
        raise AlreadyResolvedError(f"suggestion {suggestion.id} is {suggestion.status.value}")
    _invalidate(graph, suggestion, reason)


def apply_suggestion(
    graph: DesignGraph,
    suggestion: PendingSuggestion,
    selection: Optional[Sequence[int]] = None,
) -> list[Any]:
    """Apply the selected parts of a pending suggestion, all or nothing.

    Preconditions are re-checked against the current graph first; if the
    graph moved out from under the proposal, the suggestion is rejected
    wholesale and UnknownNodeError raised. Only then does mutation begin,
    so a failure never leaves a partial application.
    """
    if suggestion.status is not SuggestionStatus.PENDING:
        raise AlreadyResolvedError(f"suggestion {suggestion.id} is {suggestion.status.value}")
    actor = suggestion.origin.value
    payload = suggestion.payload

    if isinstance(payload, RefineResult):
        if selection is not None:
            raise InvalidSelectionError("a refine suggestion is accepted whole")
        if payload.node_id not in graph.nodes:
            _invalidate(graph, suggestion, f"node {payload.node_id!r} no longer exists")
            raise UnknownNodeError(f"unknown node id {payload.node_id!r}")
        node = graph.modify_node(
            payload.node_id,
            new_title=payload.title,
            new_description=payload.description,
            new_kind=payload.kind,
            actor=actor,
        )
        suggestion.status = SuggestionStatus.ACCEPTED
        results: list[Any] = [node]
        graph.emit(
            "suggestion_accepted",
            "user",
            {
                "suggestion_id": suggestion.id,
                "origin": actor,
                "selection": [0],
                "status": suggestion.status.value,
            },
        )
        return results

    if isinstance(payload, SplitResult):
        indices = _normalize_selection(selection, len(payload.new_nodes))
        if payload.old_node_id not in graph.nodes:
            _invalidate(graph, suggestion, f"node {payload.old_node_id!r} no longer exists")
            raise UnknownNodeError(f"unknown node id {payload.old_node_id!r}")
        original = graph.nodes[payload.old_node_id]
        incident = [(e.source, e.target, e.label) for e in graph.incident_edges(original.id)]
        results = []
        new_nodes = []
        for index in indices:
            child = payload.new_nodes[index]
            node = graph.add_node(
                child.kind,
                child.title,
                child.description,
                provenance=suggestion.origin,
                actor=actor,
            )
            new_nodes.append(node)
            results.append(node)
        for source, target, label in incident:
            for node in new_nodes:
                if source == original.id:
                    results.append(graph.create_edge(node.id, target, label, actor=actor))
                else:
                    results.append(graph.create_edge(source, node.id, label, actor=actor))
        graph.delete_node(original.id, actor=actor)
        suggestion.status = (
            SuggestionStatus.ACCEPTED
            if len(indices) == len(payload.new_nodes)
            else SuggestionStatus.PARTIALLY_ACCEPTED
        )
        graph.emit(
            "suggestion_accepted",
            "user",
            {
                "suggestion_id": suggestion.id,
                "origin": actor,
                "selection": indices,
                "status": suggestion.status.value,
            },
        )
        return results

    actions: list[AgentAction] = list(payload)
    indices = _normalize_selection(selection, len(actions))
    selected = [actions[i] for i in indices]
    for action in selected:
        if isinstance(action, ModifyAction) and action.card_id not in graph.nodes:
            _invalidate(graph, suggestion, f"node {action.card_id!r} no longer exists")
            raise UnknownNodeError(f"unknown node id {action.card_id!r}")
        if isinstance(action, CreateEdgeAction):
            for endpoint in (action.source_id, action.target_id):
                if endpoint not in graph.nodes:
                    _invalidate(graph, suggestion, f"node {endpoint!r} no longer exists")
                    raise UnknownNodeError(f"unknown node id {endpoint!r}")
    results = []
    for action in selected:
        if isinstance(action, AddAction):
            results.append(
                graph.add_node(
                    action.kind,
                    action.title,
                    action.description,
                    provenance=suggestion.origin,
                    actor=actor,
                )
            )
        elif isinstance(action, ModifyAction):
            results.append(
                graph.modify_node(
                    action.card_id,
                    new_title=action.title,
                    new_description=action.description,
                    new_kind=action.kind,
                    actor=actor,
                )
            )
        else:
            results.append(
                graph.create_edge(
                    action.source_id, action.target_id, action.label, actor=actor
                )
            )
    suggestion.status = (
        SuggestionStatus.ACCEPTED
        if len(indices) == len(actions)
        else SuggestionStatus.PARTIALLY_ACCEPTED
    )
    graph.emit(
        "suggestion_accepted",
        "user",
        {
            "suggestion_id": suggestion.id,
            "origin": actor,
            "selection": indices,
            "status": suggestion.status.value,
        },
    )
    return results
