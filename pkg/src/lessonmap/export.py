"""Graph exports: linear lesson-plan documents and printable card decks.

Both exports are pure functions of a graph snapshot: equal graphs produce
byte-equal documents, and exporting never mutates the graph. The lesson
plan orders sections by the six-kind pedagogical sequence; the card deck
renders one card per node with a print stylesheet (A6 landscape) or a
lossless JSON form that can be re-imported.
"""

from __future__ import annotations

import html
import json
import re
from typing import Any, Union

from .graph import DesignGraph, Edge, Node, NodeKind, parse_kind
from .richtext import html_to_text, sanitize_description


class UnsupportedFormatError(Exception):
    pass


SECTION_ORDER = [
    NodeKind.LEARNER,
    NodeKind.OBJECTIVE,
    NodeKind.STRATEGY,
    NodeKind.ACTIVITY,
    NodeKind.RESOURCE,
    NodeKind.EVALUATION,
]

SECTION_TITLES = {
    NodeKind.LEARNER: "Learner Analysis",
    NodeKind.OBJECTIVE: "Learning Objectives",
    NodeKind.STRATEGY: "Instructional Strategies",
    NodeKind.ACTIVITY: "Learning Activities",
    NodeKind.RESOURCE: "Project Resources",
    NodeKind.EVALUATION: "Assessment & Evaluation",
}

_FIRST_INT_RE = re.compile(r"\d+")


def _creation_order(nodes) -> list[Node]:
    return sorted(nodes, key=lambda n: (n.created_at, n.id))


def _section_nodes(graph: DesignGraph, kind: NodeKind) -> list[Node]:
    nodes = _creation_order(n for n in graph.nodes.values() if n.kind is kind)
    if kind is not NodeKind.ACTIVITY:
        return nodes
    # Activities carry their sequence in the title ("Activity 1: ..."); sort
    # by the first numeral when present, keeping creation order otherwise.
    def key(node: Node):
        match = _FIRST_INT_RE.search(node.title)
        if match:
            return (0, int(match.group()), node.created_at, node.id)
        return (1, 0, node.created_at, node.id)

    return sorted(nodes, key=key)


def _outgoing(graph: DesignGraph, node_id: str) -> list[Edge]:
    return sorted(
        (e for e in graph.edges.values() if e.source == node_id), key=lambda e: e.id
    )


def _cross_references(graph: DesignGraph, node: Node) -> list[str]:
    lines = []
    for edge in _outgoing(graph, node.id):
        target = graph.nodes[edge.target]
        lines.append(f"{edge.label} → {target.title}")
    return lines


def export_lesson_plan(
    graph: DesignGraph, format: str = "markdown", title: str = "Lesson Plan"
) -> bytes:
    """Render the graph as a linear plan with the six fixed sections."""
    if format == "markdown":
        return _lesson_plan_markdown(graph, title).encode("utf-8")
    if format == "html":
        return _lesson_plan_html(graph, title).encode("utf-8")
    raise UnsupportedFormatError(f"unsupported lesson plan format {format!r}")


def _lesson_plan_markdown(graph: DesignGraph, title: str) -> str:
    lines = [f"# {title}", ""]
    for kind in SECTION_ORDER:
        lines.append(f"## {SECTION_TITLES[kind]}")
        lines.append("")
        nodes = _section_nodes(graph, kind)
        if not nodes:
            lines.append("(no entries)")
            lines.append("")
            continue
        for node in nodes:
            lines.append(f"### {node.title}")
            text = html_to_text(node.description).strip()
            if text:
                lines.append("")
                lines.append(text)
            refs = _cross_references(graph, node)
            if refs:
                lines.append("")
                lines.extend(f"- {ref}" for ref in refs)
            lines.append("")
    return "\n".join(lines).rstrip() + "\n"


_LESSON_PLAN_CSS = """\
body { font-family: Georgia, serif; max-width: 52rem; margin: 2rem auto; }
h1 { border-bottom: 2px solid #333; padding-bottom: 0.3rem; }
h2 { margin-top: 2rem; color: #234; }
section.entry { margin: 1rem 0 1.5rem; }
ul.refs { color: #456; }
p.empty { color: #999; font-style: italic; }
"""


def _lesson_plan_html(graph: DesignGraph, title: str) -> str:
    parts = [
        "<!doctype html>",
        '<html lang="en">',
        "<head>",
        '<meta charset="utf-8">',
        f"<title>{html.escape(title)}</title>",
        f"<style>{_LESSON_PLAN_CSS}</style>",
        "</head>",
        "<body>",
        f"<h1>{html.escape(title)}</h1>",
    ]
    for kind in SECTION_ORDER:
        parts.append(f"<h2>{html.escape(SECTION_TITLES[kind])}</h2>")
        nodes = _section_nodes(graph, kind)
        if not nodes:
            parts.append('<p class="empty">(no entries)</p>')
            continue
        for node in nodes:
            parts.append('<section class="entry">')
            parts.append(f'<h3 class="entry-title">{html.escape(node.title)}</h3>')
            description = sanitize_description(node.description)
            if description.strip():
                parts.append(f'<div class="description">{description}</div>')
            refs = _cross_references(graph, node)
            if refs:
                parts.append('<ul class="refs">')
                parts.extend(f"<li>{html.escape(ref)}</li>" for ref in refs)
                parts.append("</ul>")
            parts.append("</section>")
    parts.extend(["</body>", "</html>"])
    return "\n".join(parts) + "\n"


# -- card deck --------------------------------------------------------------------


_CARD_CSS = """\
@page { size: A6 landscape; margin: 6mm; }
body { font-family: "Helvetica Neue", Arial, sans-serif; margin: 0; }
.card {
  width: 148mm; height: 105mm; box-sizing: border-box;
  border: 1px solid #222; border-radius: 4mm; margin: 4mm;
  page-break-after: always; display: flex; flex-direction: column;
  overflow: hidden;
}
.banner { color: #fff; padding: 3mm 5mm; font-weight: bold; letter-spacing: 0.05em; }
.kind-learner { background: #7b5cd6; }
.kind-objective { background: #d6604d; }
.kind-strategy { background: #2a9d8f; }
.kind-activity { background: #e9a23b; }
.kind-resource { background: #4a90d9; }
.kind-evaluation { background: #6d9e3f; }
.card h2 { margin: 3mm 5mm 1mm; font-size: 14pt; }
.card .description { margin: 1mm 5mm; font-size: 10pt; flex: 1; overflow: hidden; }
.card footer { margin: 2mm 5mm; font-size: 8pt; color: #666; }
"""

CARD_DECK_SCHEMA_VERSION = 1


def export_cards(graph: DesignGraph, format: str = "html_print", session_label: str = "") -> bytes:
    """Render one card per node, printable or as lossless JSON."""
    if format == "json":
        return _cards_json(graph, session_label).encode("utf-8")
    if format == "html_print":
        return _cards_html(graph, session_label).encode("utf-8")
    raise UnsupportedFormatError(f"unsupported card deck format {format!r}")


def _cards_json(graph: DesignGraph, session_label: str) -> str:
    doc = {
        "schema_version": CARD_DECK_SCHEMA_VERSION,
        "session": session_label,
        "cards": [
            {"tag": n.kind.value, "title": n.title, "description": n.description}
            for n in _creation_order(graph.nodes.values())
        ],
    }
    return json.dumps(doc, ensure_ascii=False, indent=1) + "\n"


def _cards_html(graph: DesignGraph, session_label: str) -> str:
    parts = [
        "<!doctype html>",
        '<html lang="en">',
        "<head>",
        '<meta charset="utf-8">',
        "<title>Card Deck</title>",
        f"<style>{_CARD_CSS}</style>",
        "</head>",
        "<body>",
    ]
    for node in _creation_order(graph.nodes.values()):
        css_kind = node.kind.value.lower()
        parts.append(f'<div class="card kind-{css_kind}">')
        parts.append(f'<div class="banner">{html.escape(node.kind.value)}</div>')
        parts.append(f'<h2 class="card-title">{html.escape(node.title)}</h2>')
        description = sanitize_description(node.description)
        parts.append(f'<div class="description">{description}</div>')
        footer = html.escape(session_label) if session_label else "&nbsp;"
        parts.append(f"<footer>{footer}</footer>")
        parts.append("</div>")
    parts.extend(["</body>", "</html>"])
    return "\n".join(parts) + "\n"


def import_card_deck(document: Union[str, bytes]) -> list[dict[str, Any]]:
    """Parse a JSON card deck back into card dicts with canonical tags."""
    if isinstance(document, bytes):
        document = document.decode("utf-8")
    doc = json.loads(document)
    if not isinstance(doc, dict) or not isinstance(doc.get("cards"), list):
        raise ValueError("not a card deck document")
    cards = []
    for raw in doc["cards"]:
        kind = parse_kind(raw["tag"])
        cards.append(
            {
                "tag": kind.value,
                "title": str(raw["title"]),
                "description": str(raw.get("description", "")),
            }
        )
    return cards
