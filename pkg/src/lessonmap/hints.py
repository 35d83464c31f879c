"""Curated design-hint library.

Hints are preset card contents (title plus abridged description) that users
can browse by kind and insert as starting points. They are data, not
generation: inserting one always yields a user-provenance node. The built-in
set ships as a JSON file inside the package and can be extended or replaced
with a custom file.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Optional, Union

from .graph import NodeKind, parse_kind


@dataclass(frozen=True)
class DesignHint:
    kind: NodeKind
    category: str
    title: str
    description: str


def _parse_hint(raw: dict) -> DesignHint:
    return DesignHint(
        kind=parse_kind(raw["kind"]),
        category=str(raw["category"]),
        title=str(raw["title"]),
        description=str(raw["description"]),
    )


def load_hints(path: Optional[Union[str, Path]] = None) -> list[DesignHint]:
    """Load hints from a JSON array file; defaults to the bundled set."""
    if path is None:
        text = resources.files("lessonmap.data").joinpath("hints.json").read_text("utf-8")
    else:
        text = Path(path).read_text("utf-8")
    raw = json.loads(text)
    if not isinstance(raw, list):
        raise ValueError("hints file must contain a JSON array")
    return [_parse_hint(entry) for entry in raw]


class HintLibrary:
    """Built-in hints plus any user-supplied additions, in stable order."""

    def __init__(self, path: Optional[Union[str, Path]] = None) -> None:
        self._hints: list[DesignHint] = load_hints(path)

    def add(self, hint: DesignHint) -> None:
        self._hints.append(hint)

    def list(self, kind: Optional[NodeKind] = None) -> list[DesignHint]:
        """All hints, or only those for one kind, in load-then-added order."""
        if kind is None:
            return list(self._hints)
        kind = parse_kind(kind)
        return [h for h in self._hints if h.kind is kind]


_DEFAULT_LIBRARY: Optional[HintLibrary] = None


def list_hints(kind: Optional[NodeKind] = None) -> list[DesignHint]:
    """List built-in hints, optionally filtered by kind."""
    global _DEFAULT_LIBRARY
    if _DEFAULT_LIBRARY is None:
        _DEFAULT_LIBRARY = HintLibrary()
    return _DEFAULT_LIBRARY.list(kind)
