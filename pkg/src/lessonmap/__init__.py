"""Collaborative lesson-design engine.

A typed design graph co-edited by a teacher and three reviewable AI agents:
a conversational agent over the whole canvas plus refine and split agents
over single cards. Ships with an action protocol, session event logs with
deterministic replay, behavioral metrics, usage accounting, document
exports, and an HTTP API.
"""

from .agents import (
    AgentKind,
    DirectoryScriptLlm,
    HttpLlm,
    LlmResponse,
    MockLlm,
    PromptBundle,
    RetryPolicy,
    TransportError,
    UsageLedger,
    build_context,
    invoke,
    ledger_report,
    load_prompt,
)
from .analytics import (
    Lexicon,
    MetricsReport,
    cohens_d_from_stats,
    cohens_d_paired,
    cohens_d_pooled,
    compare_groups,
    comparison_to_csv,
    corpus_compare,
    load_lexicon,
    report_to_json,
    reports_to_csv,
    session_report,
)
from .config import API_KEY_ENV, ServiceConfig, load_config
from .export import export_cards, export_lesson_plan, import_card_deck
from .graph import (
    DesignGraph,
    Edge,
    GraphError,
    Node,
    NodeKind,
    Provenance,
    graph_from_snapshot,
    graph_to_snapshot,
    parse_kind,
    serialize_for_context,
    suggest_label,
)
from .hints import DesignHint, HintLibrary, list_hints, load_hints
from .protocol import (
    AddAction,
    CreateEdgeAction,
    ErrorCategory,
    ModifyAction,
    PendingSuggestion,
    ProtocolError,
    RefineResult,
    SplitResult,
    SuggestionStatus,
    apply_suggestion,
    extract_actions,
    make_suggestion,
    parse_refine,
    parse_split,
    reject_suggestion,
    strip_json_blocks,
)
from .richtext import html_to_text, sanitize_description
from .service import ApiError, create_app
from .store import (
    ChatTurn,
    EventLog,
    LogEvent,
    Session,
    SessionStore,
    rebuild_chat,
    replay,
)

__version__ = "0.1.0"

__all__ = [
    "AgentKind",
    "AddAction",
    "ApiError",
    "API_KEY_ENV",
    "ChatTurn",
    "CreateEdgeAction",
    "DesignGraph",
    "DesignHint",
    "DirectoryScriptLlm",
    "Edge",
    "ErrorCategory",
    "EventLog",
    "GraphError",
    "HintLibrary",
    "HttpLlm",
    "Lexicon",
    "LlmResponse",
    "LogEvent",
    "MetricsReport",
    "MockLlm",
    "ModifyAction",
    "Node",
    "NodeKind",
    "PendingSuggestion",
    "PromptBundle",
    "ProtocolError",
    "Provenance",
    "RefineResult",
    "RetryPolicy",
    "ServiceConfig",
    "Session",
    "SessionStore",
    "SplitResult",
    "SuggestionStatus",
    "TransportError",
    "UsageLedger",
    "apply_suggestion",
    "build_context",
    "cohens_d_from_stats",
    "cohens_d_paired",
    "cohens_d_pooled",
    "compare_groups",
    "comparison_to_csv",
    "corpus_compare",
    "create_app",
    "export_cards",
    "export_lesson_plan",
    "extract_actions",
    "graph_from_snapshot",
    "graph_to_snapshot",
    "html_to_text",
    "import_card_deck",
    "invoke",
    "ledger_report",
    "list_hints",
    "load_config",
    "load_hints",
    "load_lexicon",
    "load_prompt",
    "make_suggestion",
    "parse_kind",
    "parse_refine",
    "parse_split",
    "rebuild_chat",
    "reject_suggestion",
    "replay",
    "report_to_json",
    "reports_to_csv",
    "sanitize_description",
    "serialize_for_context",
    "session_report",
    "strip_json_blocks",
    "suggest_label",
]
