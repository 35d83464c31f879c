"""Rich-text handling for node descriptions.

Descriptions may carry a small HTML subset (paragraphs, lists, bold/italic,
line breaks). Everything outside the whitelist is escaped to plain text so a
description can never smuggle markup into a rendering surface. Sanitization
is idempotent: feeding sanitized output back through produces the same bytes,
which keeps event-log replay stable.
"""

from __future__ import annotations

import html
from html.parser import HTMLParser

ALLOWED_TAGS = frozenset({"p", "ul", "ol", "li", "b", "strong", "i", "em", "br"})
VOID_TAGS = frozenset({"br"})


class _Sanitizer(HTMLParser):
    def __init__(self) -> None:
        super().__init__(convert_charrefs=False)
        self.parts: list[str] = []

    def _escape(self, raw: str) -> None:
        self.parts.append(html.escape(raw, quote=False))

    def handle_starttag(self, tag, attrs):
        if tag in ALLOWED_TAGS:
            # Attributes are dropped even on allowed tags.
            self.parts.append(f"<{tag}>")
        else:
            self._escape(self.get_starttag_text() or f"<{tag}>")

    def handle_startendtag(self, tag, attrs):
        if tag in VOID_TAGS:
            self.parts.append(f"<{tag}>")
        elif tag in ALLOWED_TAGS:
            self.parts.append(f"<{tag}></{tag}>")
        else:
            self._escape(self.get_starttag_text() or f"<{tag}/>")

    def handle_endtag(self, tag):
        if tag in VOID_TAGS:
            return
        if tag in ALLOWED_TAGS:
            self.parts.append(f"</{tag}>")
        else:
            self._escape(f"</{tag}>")

    def handle_data(self, data):
        self._escape(data)

    def handle_entityref(self, name):
        self.parts.append(f"&{name};")

    def handle_charref(self, name):
        self.parts.append(f"&#{name};")

    def handle_comment(self, data):
        self._escape(f"<!--{data}-->")

    def handle_decl(self, decl):
        self._escape(f"<!{decl}>")

    def handle_pi(self, data):
        self._escape(f"<?{data}>")

    def unknown_decl(self, data):
        self._escape(f"<![{data}]>")


def sanitize_description(text: str) -> str:
    """Return ``text`` with only whitelisted HTML kept; everything else escaped."""
    parser = _Sanitizer()
    parser.feed(text)
    parser.close()
    return "".join(parser.parts)


class _TextExtractor(HTMLParser):
    def __init__(self) -> None:
        super().__init__(convert_charrefs=True)
        self.parts: list[str] = []

    def handle_starttag(self, tag, attrs):
        if tag == "li":
            self.parts.append("\n- ")
        elif tag == "br":
            self.parts.append("\n")
        elif tag == "p":
            self.parts.append("\n")

    def handle_endtag(self, tag):
        if tag in ("p", "ul", "ol"):
            self.parts.append("\n")

    def handle_data(self, data):
        self.parts.append(data)


def html_to_text(text: str) -> str:
    """Flatten a sanitized description to plain text with ``- `` list bullets."""
    parser = _TextExtractor()
    parser.feed(text)
    parser.close()
    flat = "".join(parser.parts)
    lines = [line.rstrip() for line in flat.splitlines()]
    out: list[str] = []
    for line in lines:
        if line or (out and out[-1]):
            out.append(line)
    while out and not out[-1]:
        out.pop()
    return "\n".join(out).strip("\n")
