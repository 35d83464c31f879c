"""Service configuration: file-backed settings plus the credential env var."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

API_KEY_ENV = "LESSONMAP_API_KEY"


@dataclass
class ServiceConfig:
    """Documented config keys for the server.

    model_name: completion model identifier sent to the endpoint.
    base_url: endpoint base URL (chat-completions wire shape).
    rate_in / rate_out: dollars per million input/output tokens.
    max_retries: re-requests after a retryable protocol failure.
    lexicon_path: negative-keyword lexicon file; None = bundled default.
    hints_path: design-hints JSON file; None = bundled default.
    """

    model_name: str = "gpt-4.1"
    base_url: str = "https://api.openai.com/v1"
    rate_in: float = 2.00
    rate_out: float = 8.00
    max_retries: int = 2
    lexicon_path: Optional[str] = None
    hints_path: Optional[str] = None


def load_config(path: Optional[Union[str, Path]] = None) -> ServiceConfig:
    """Read a JSON config file; missing file or None yields defaults."""
    config = ServiceConfig()
    if path is None:
        return config
    doc = json.loads(Path(path).read_text("utf-8"))
    if not isinstance(doc, dict):
        raise ValueError("config file must contain a JSON object")
    for key in (
        "model_name",
        "base_url",
        "lexicon_path",
        "hints_path",
    ):
        if key in doc and doc[key] is not None:
            setattr(config, key, str(doc[key]))
    if "rate_in" in doc:
        config.rate_in = float(doc["rate_in"])
    if "rate_out" in doc:
        config.rate_out = float(doc["rate_out"])
    if "max_retries" in doc:
        config.max_retries = int(doc["max_retries"])
    if config.rate_in < 0 or config.rate_out < 0:
        raise ValueError("token rates must be non-negative")
    if config.max_retries < 0:
        raise ValueError("max_retries must be non-negative")
    return config
