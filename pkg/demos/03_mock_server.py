"""The HTTP service end to end, fully offline.

Boots the real server on an ephemeral port with a directory of scripted
agent replies (the same wiring as `lessonmap-server --mock-script-dir`),
then drives a short session over plain HTTP.
"""

import tempfile
import threading
import time
from pathlib import Path

import httpx
import uvicorn

from lessonmap import DirectoryScriptLlm, ServiceConfig, SessionStore, create_app

# Two canned replies: the script wraps around, so order is all that matters.
scripts = Path(tempfile.mkdtemp(prefix="lessonmap-scripts-"))
(scripts / "001_suggest.txt").write_text(
    "Start with the assessment so the activities have a target.\n"
    '{"actions": [{"option": "add", "type": "Assessments",'
    ' "title": "Gallery walk rubric",'
    ' "description": "<p>Three criteria, three levels each.</p>"}]}',
    "utf-8",
)
(scripts / "002_prose.txt").write_text(
    "That looks balanced now; I have nothing to add.", "utf-8"
)

store = SessionStore(tempfile.mkdtemp(prefix="lessonmap-data-"))
app = create_app(store, DirectoryScriptLlm(scripts), ServiceConfig())

server = uvicorn.Server(uvicorn.Config(app, host="127.0.0.1", port=0, log_level="warning"))
thread = threading.Thread(target=server.run, daemon=True)
thread.start()
while not server.started:
    time.sleep(0.02)
port = server.servers[0].sockets[0].getsockname()[1]
base = f"http://127.0.0.1:{port}/v1"
print(f"serving on {base}")

with httpx.Client() as client:
    print("health:", client.get(f"{base}/health").json())

    session = client.post(f"{base}/sessions", json={"task_label": "Water cycle unit"}).json()
    sid = session["id"]

    node = client.post(
        f"{base}/sessions/{sid}/nodes",
        json={"tag": "Activity", "title": "Activity 1: Build a terrarium"},
    ).json()["node"]
    print(f"added node {node['id']} ({node['tag']})")

    chat = client.post(
        f"{base}/sessions/{sid}/chat", json={"text": "What am I missing?"}
    ).json()
    suggestion = chat["suggestion"]
    print("assistant:", chat["assistant_narration"].splitlines()[0])
    print("offered:", suggestion["actions"][0]["title"])

    resolved = client.post(
        f"{base}/sessions/{sid}/suggestions/{suggestion['id']}/resolve",
        json={"decision": "accept"},
    ).json()
    print("graph now has", len(resolved["graph"]["nodes"]), "nodes")

    followup = client.post(f"{base}/sessions/{sid}/chat", json={"text": "better?"}).json()
    print("assistant:", followup["assistant_narration"])

    deck = client.get(
        f"{base}/sessions/{sid}/export", params={"mode": "cards", "format": "json"}
    ).json()
    print("card deck:", [card["title"] for card in deck["cards"]])

    metrics = client.get(f"{base}/sessions/{sid}/metrics").json()
    print(f"turns {metrics['total_turns']}, "
          f"acceptance rate {metrics['suggestion_acceptance_rate']}")

server.should_exit = True
thread.join(timeout=5)
print("server stopped")
