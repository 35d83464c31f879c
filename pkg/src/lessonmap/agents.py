"""Agent orchestration: prompt assembly, endpoint calls, retries, accounting.

Three agents share one invocation path. The conversational agent sees the
chat history plus the whole serialized graph; the refine and split agents
see only their target node and its distance-1 neighborhood. Replies are
parsed by the protocol module; parse failures trigger bounded re-requests.
Every attempt is metered in a UsageLedger (tokens, dollars, latency).
"""

from __future__ import annotations

import json
import statistics
import time
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from math import ceil
from pathlib import Path
from typing import Any, Callable, Optional, Sequence, Union

from .graph import DesignGraph, GraphError, Provenance, UnknownNodeError, serialize_for_context
from .protocol import (
    ErrorCategory,
    PendingSuggestion,
    ProtocolError,
    extract_actions,
    make_suggestion,
    parse_refine,
    parse_split,
    strip_json_blocks,
)


class AgentKind(str, Enum):
    GLOBAL = "global"
    REFINE = "refine"
    SPLIT = "split"


_PROMPT_FILES = {
    AgentKind.GLOBAL: "global_agent.txt",
    AgentKind.REFINE: "refine_agent.txt",
    AgentKind.SPLIT: "split_agent.txt",
}

_ORIGINS = {
    AgentKind.GLOBAL: Provenance.GLOBAL_AGENT,
    AgentKind.REFINE: Provenance.REFINE_AGENT,
    AgentKind.SPLIT: Provenance.SPLIT_AGENT,
}

# Most recent turns kept verbatim in the conversational context; older
# turns are dropped to bound prompt growth.
HISTORY_WINDOW = 20


class MissingTargetError(GraphError):
    pass


class TransportError(Exception):
    """Network or endpoint failure; never retried as a protocol error."""


class ScriptExhaustedError(Exception):
    """A scripted endpoint ran out of responses."""


def load_prompt(agent: AgentKind) -> str:
    name = _PROMPT_FILES[AgentKind(agent)]
    return resources.files("lessonmap.prompts").joinpath(name).read_text("utf-8")


@dataclass(frozen=True)
class PromptBundle:
    system_prompt: str
    context: str
    user_message: Optional[str] = None


def _node_doc(node) -> dict[str, str]:
    return {"id": node.id, "tag": node.kind.value, "title": node.title, "description": node.description}


def build_context(
    agent: AgentKind,
    session,
    target_node_id: Optional[str] = None,
    user_message: Optional[str] = None,
) -> PromptBundle:
    """Deterministic prompt bundle for one agent call.

    ``session`` only needs ``graph`` and ``chat`` attributes. The
    conversational agent gets full history (bounded window) and the whole
    graph; refine/split get the target node and exactly its distance-1
    neighbors with the connecting edges.
    """
    agent = AgentKind(agent)
    graph: DesignGraph = session.graph
    if agent is AgentKind.GLOBAL:
        if target_node_id is not None:
            raise GraphError("the conversational agent takes no target node")
        turns = list(session.chat)[-HISTORY_WINDOW:]
        if turns:
            history = "\n".join(f"{turn.author}: {turn.text}" for turn in turns)
        else:
            history = "(none)"
        context = (
            "Conversation history:\n"
            + history
            + "\n\nCurrent design graph:\n"
            + serialize_for_context(graph)
        )
        return PromptBundle(load_prompt(agent), context, user_message)
    if target_node_id is None:
        raise MissingTargetError(f"{agent.value} agent requires a target node")
    node = graph.nodes.get(target_node_id)
    if node is None:
        raise UnknownNodeError(f"unknown node id {target_node_id!r}")
    neighbors = graph.neighbors(target_node_id)
    edges = graph.incident_edges(target_node_id)
    doc = {
        "target": _node_doc(node),
        "neighbors": [_node_doc(n) for n in neighbors],
        "edges": [
            {"source": e.source, "target": e.target, "label": e.label} for e in edges
        ],
    }
    context = "Selected card and its neighborhood:\n" + json.dumps(
        doc, ensure_ascii=False, indent=1
    )
    return PromptBundle(load_prompt(agent), context, user_message)


# -- usage accounting ---------------------------------------------------------


def nearest_rank(samples: Sequence[float], fraction: float) -> float:
    """Nearest-rank percentile: value at index ceil(fraction*n) of the sorted list."""
    if not samples:
        raise ValueError("no samples")
    ordered = sorted(samples)
    rank = ceil(fraction * len(ordered))
    return ordered[max(rank, 1) - 1]


@dataclass
class UsageLedger:
    """Token, cost, and latency accounting for one session's agent calls."""

    rate_in: float = 2.00
    rate_out: float = 8.00
    calls: int = 0
    input_tokens: int = 0
    output_tokens: int = 0
    call_latencies_ms: list[float] = field(default_factory=list)
    interaction_latencies_ms: list[float] = field(default_factory=list)

    def record_call(self, input_tokens: int, output_tokens: int, latency_ms: float) -> None:
        if input_tokens < 0 or output_tokens < 0 or latency_ms < 0:
            raise ValueError("usage figures must be non-negative")
        self.calls += 1
        self.input_tokens += int(input_tokens)
        self.output_tokens += int(output_tokens)
        self.call_latencies_ms.append(float(latency_ms))

    def record_interaction(self, latency_ms: float) -> None:
        self.interaction_latencies_ms.append(float(latency_ms))

    def cost(self) -> float:
        """Dollars: tokens times per-million rates."""
        return (
            self.input_tokens * self.rate_in / 1_000_000
            + self.output_tokens * self.rate_out / 1_000_000
        )

    def merge(self, other: "UsageLedger") -> "UsageLedger":
        if (self.rate_in, self.rate_out) != (other.rate_in, other.rate_out):
            raise ValueError("cannot merge ledgers with different rates")
        return UsageLedger(
            rate_in=self.rate_in,
            rate_out=self.rate_out,
            calls=self.calls + other.calls,
            input_tokens=self.input_tokens + other.input_tokens,
            output_tokens=self.output_tokens + other.output_tokens,
            call_latencies_ms=self.call_latencies_ms + other.call_latencies_ms,
            interaction_latencies_ms=self.interaction_latencies_ms
            + other.interaction_latencies_ms,
        )


def _latency_stats(samples: Sequence[float]) -> dict[str, Optional[float]]:
    if not samples:
        return {"mean": None, "median": None, "p90": None}
    return {
        "mean": statistics.fmean(samples),
        "median": statistics.median(samples),
        "p90": nearest_rank(samples, 0.90),
    }


def ledger_report(ledger: UsageLedger) -> dict[str, Any]:
    """Aggregate usage report; latency given per call and per interaction."""
    calls = _latency_stats(ledger.call_latencies_ms)
    interactions = _latency_stats(ledger.interaction_latencies_ms)
    mean_tokens = (
        (ledger.input_tokens + ledger.output_tokens) / ledger.calls if ledger.calls else 0.0
    )
    return {
        "calls": ledger.calls,
        "input_tokens": ledger.input_tokens,
        "output_tokens": ledger.output_tokens,
        "cost_dollars": ledger.cost(),
        "mean_tokens_per_call": mean_tokens,
        "latency_mean": calls["mean"],
        "latency_median": calls["median"],
        "latency_p90": calls["p90"],
        "interaction_latency_mean": interactions["mean"],
        "interaction_latency_median": interactions["median"],
        "interaction_latency_p90": interactions["p90"],
    }


# -- completion endpoints -------------------------------------------------------


@dataclass
class LlmResponse:
    text: str
    input_tokens: int
    output_tokens: int
    latency_ms: float


def _rough_tokens(text: str) -> int:
    # Deterministic stand-in used by scripted endpoints: 4 chars per token.
    return max(1, len(text) // 4)


def _scripted_response(entry: Any, prompt_chars: int) -> LlmResponse:
    if isinstance(entry, LlmResponse):
        return entry
    if isinstance(entry, dict):
        text = entry["text"]
        return LlmResponse(
            text=text,
            input_tokens=int(entry.get("input_tokens", max(1, prompt_chars // 4))),
            output_tokens=int(entry.get("output_tokens", _rough_tokens(text))),
            latency_ms=float(entry.get("latency_ms", 0.0)),
        )
    text = str(entry)
    return LlmResponse(
        text=text,
        input_tokens=max(1, prompt_chars // 4),
        output_tokens=_rough_tokens(text),
        latency_ms=0.0,
    )


class MockLlm:
    """Replays an ordered script of responses; raises when exhausted."""

    def __init__(self, script: Sequence[Any]) -> None:
        self._script = list(script)
        self._cursor = 0

    def remaining(self) -> int:
        return len(self._script) - self._cursor

    def complete(self, system: str, messages: list[dict], model: str) -> LlmResponse:
        if self._cursor >= len(self._script):
            raise ScriptExhaustedError("mock script exhausted")
        entry = self._script[self._cursor]
        self._cursor += 1
        prompt_chars = len(system) + sum(len(m.get("content", "")) for m in messages)
        return _scripted_response(entry, prompt_chars)


class DirectoryScriptLlm:
    """Offline endpoint for mock-mode serving: replays response files.

    Files under the directory are consumed in sorted-name order and the
    script wraps around when exhausted, so a long demo session keeps
    working.
    """

    def __init__(self, directory: Union[str, Path]) -> None:
        self._dir = Path(directory)
        files = sorted(p for p in self._dir.iterdir() if p.is_file())
        if not files:
            raise ScriptExhaustedError(f"no script files in {self._dir}")
        self._texts = [p.read_text("utf-8") for p in files]
        self._cursor = 0

    def complete(self, system: str, messages: list[dict], model: str) -> LlmResponse:
        text = self._texts[self._cursor % len(self._texts)]
        self._cursor += 1
        prompt_chars = len(system) + sum(len(m.get("content", "")) for m in messages)
        return LlmResponse(
            text=text,
            input_tokens=max(1, prompt_chars // 4),
            output_tokens=_rough_tokens(text),
            latency_ms=0.0,
        )


class HttpLlm:
    """Chat-completions endpoint client (OpenAI-compatible wire shape)."""

    def __init__(
        self,
        base_url: str,
        api_key: str,
        model: str,
        timeout_s: float = 60.0,
    ) -> None:
        import httpx

        self._client = httpx.Client(base_url=base_url.rstrip("/"), timeout=timeout_s)
        self._api_key = api_key
        self.model = model

    def complete(self, system: str, messages: list[dict], model: str) -> LlmResponse:
        import httpx

        body = {
            "model": model or self.model,
            "messages": [{"role": "system", "content": system}] + list(messages),
        }
        started = time.perf_counter()
        try:
            response = self._client.post(
                "/chat/completions",
                json=body,
                headers={"Authorization": f"Bearer {self._api_key}"},
            )
            response.raise_for_status()
            data = response.json()
        except (httpx.HTTPError, ValueError) as exc:
            raise TransportError(str(exc)) from exc
        latency_ms = (time.perf_counter() - started) * 1000.0
        try:
            text = data["choices"][0]["message"]["content"]
            usage = data.get("usage", {})
        except (KeyError, IndexError, TypeError) as exc:
            raise TransportError(f"malformed endpoint response: {exc}") from exc
        return LlmResponse(
            text=text,
            input_tokens=int(usage.get("prompt_tokens", 0)),
            output_tokens=int(usage.get("completion_tokens", 0)),
            latency_ms=latency_ms,
        )


# -- invocation with retry -------------------------------------------------------


@dataclass(frozen=True)
class RetryPolicy:
    max_retries: int = 2
    retry_on: frozenset = frozenset(
        {ErrorCategory.SYNTACTIC, ErrorCategory.STRUCTURAL_VIOLATION}
    )


def _parse_reply(
    agent: AgentKind,
    text: str,
    graph: Optional[DesignGraph],
    target_node_id: Optional[str],
):
    if agent is AgentKind.GLOBAL:
        return extract_actions(text, graph)
    if agent is AgentKind.REFINE:
        return parse_refine(text, target_node_id)
    return parse_split(text, target_node_id)


def invoke(
    agent: AgentKind,
    bundle: PromptBundle,
    policy: RetryPolicy,
    llm,
    *,
    graph: Optional[DesignGraph] = None,
    target_node_id: Optional[str] = None,
    ledger: Optional[UsageLedger] = None,
    model: str = "",
    on_protocol_error: Optional[Callable[[ProtocolError, int], None]] = None,
) -> Union[PendingSuggestion, ProtocolError]:
    """Call the endpoint, parse, and retry on retryable protocol failures.

    Returns a PendingSuggestion on success or the last ProtocolError once
    retries are exhausted. TransportError propagates immediately. Each
    attempt accrues to the ledger; the whole invoke adds one interaction
    latency sample (sum over attempts).
    """
    agent = AgentKind(agent)
    if agent is not AgentKind.GLOBAL and target_node_id is None:
        raise MissingTargetError(f"{agent.value} agent requires a target node")
    content = bundle.context
    if bundle.user_message:
        content = content + "\n\nUser request:\n" + bundle.user_message
    messages = [{"role": "user", "content": content}]
    interaction_ms = 0.0
    attempts = 1 + max(0, int(policy.max_retries))
    last_error: Optional[ProtocolError] = None
    try:
        for attempt in range(attempts):
            started = time.perf_counter()
            response = llm.complete(bundle.system_prompt, messages, model)
            elapsed_ms = (time.perf_counter() - started) * 1000.0
            latency_ms = response.latency_ms if response.latency_ms > 0 else elapsed_ms
            interaction_ms += latency_ms
            if ledger is not None:
                ledger.record_call(response.input_tokens, response.output_tokens, latency_ms)
            parsed = _parse_reply(agent, response.text, graph, target_node_id)
            if isinstance(parsed, ProtocolError):
                last_error = parsed
                if on_protocol_error is not None:
                    on_protocol_error(parsed, attempt)
                if parsed.category in policy.retry_on and attempt + 1 < attempts:
                    continue
                return parsed
            narration = strip_json_blocks(response.text)
            return make_suggestion(_ORIGINS[agent], parsed, narration)
        assert last_error is not None
        return last_error
    finally:
        if ledger is not None and interaction_ms > 0:
            ledger.record_interaction(interaction_ms)


def agent_origin(agent: AgentKind) -> Provenance:
    return _ORIGINS[AgentKind(agent)]
