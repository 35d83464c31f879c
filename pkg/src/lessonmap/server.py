"""Server entry point: CLI flags, endpoint wiring, uvicorn launch.

Mock mode (--mock-script-dir) runs fully offline against a directory of
scripted reply files; otherwise the credential is read from the
LESSONMAP_API_KEY environment variable and requests go to the configured
endpoint.
"""

from __future__ import annotations

import argparse
import os
import sys
from typing import Optional, Sequence

from .agents import DirectoryScriptLlm, HttpLlm
from .config import API_KEY_ENV, load_config
from .service import create_app
from .store import SessionStore


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lessonmap-server",
        description="Serve the collaborative lesson-design API.",
    )
    parser.add_argument("--host", default="127.0.0.1", help="listen address")
    parser.add_argument("--port", type=int, default=8080, help="listen port")
    parser.add_argument(
        "--data-dir",
        default="./lessonmap-data",
        help="directory for session logs and the session index",
    )
    parser.add_argument("--config", default=None, help="path to a JSON config file")
    parser.add_argument(
        "--mock-script-dir",
        default=None,
        help="serve offline, replaying agent reply files from this directory",
    )
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    config = load_config(args.config)
    if args.mock_script_dir:
        llm = DirectoryScriptLlm(args.mock_script_dir)
    else:
        api_key = os.environ.get(API_KEY_ENV, "")
        if not api_key:
            print(
                f"error: set {API_KEY_ENV} or use --mock-script-dir for offline mode",
                file=sys.stderr,
            )
            return 2
        llm = HttpLlm(config.base_url, api_key, config.model_name)
    store = SessionStore(args.data_dir)
    app = create_app(store, llm, config)
    import uvicorn

    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


if __name__ == "__main__":
    sys.exit(main())
