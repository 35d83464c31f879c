"""A full collaborative design session, scripted end to end.

Walks the library surface without the HTTP layer: build a graph, chat with
a scripted agent, review its suggestions, and print the resulting plan.
"""

import random
import tempfile

from lessonmap import (
    AgentKind,
    MockLlm,
    NodeKind,
    RetryPolicy,
    SessionStore,
    apply_suggestion,
    build_context,
    export_lesson_plan,
    invoke,
    ledger_report,
    list_hints,
)

random.seed(7)

# Sessions live in a directory; every mutation lands in an append-only log.
store = SessionStore(tempfile.mkdtemp(prefix="lessonmap-demo-"))
session = store.create_session("Owls: a third-grade project")
graph = session.graph

# Seed the canvas by hand, the way a teacher would start.
learners = graph.add_node(NodeKind.LEARNER, "Third graders, mixed reading levels")
objective = graph.add_node(
    NodeKind.OBJECTIVE,
    "Name three owl adaptations",
    "<p>Students can explain how each adaptation helps the owl hunt.</p>",
)
print(f"seeded {len(graph.nodes)} cards, revision {graph.revision}")

# The preset library offers exemplar card contents for inspiration.
for hint in list_hints(NodeKind.ACTIVITY)[:2]:
    print(f"hint ({hint.category}): {hint.title}")

# The conversational agent replies in prose with an embedded action block.
scripted_reply = (
    "Your objective is a good anchor. Two concrete next steps:\n"
    '{"actions": [\n'
    ' {"option": "add", "type": "Activities", "title": "Activity 1: Owl pellet dissection",\n'
    '  "description": "<p>Small groups dissect pellets and tally prey bones.</p>"},\n'
    ' {"option": "add", "type": "Resources", "title": "Pellet kits",\n'
    '  "description": "<p>One kit per pair, plus tweezers.</p>"}\n'
    "]}\n"
    "Happy to split either one into smaller steps."
)
llm = MockLlm([scripted_reply])

session.add_chat_turn("user", "What activities would make this hands-on?")
bundle = build_context(AgentKind.GLOBAL, session)
suggestion = invoke(
    AgentKind.GLOBAL,
    bundle,
    RetryPolicy(),
    llm,
    graph=graph,
    ledger=session.ledger,
)
session.add_chat_turn("assistant", suggestion.narration)
session.offer_suggestion(suggestion)
print(f"\nagent narration: {suggestion.narration.splitlines()[0]}")
print(f"suggestion carries {suggestion.item_count()} actions, status {suggestion.status.value}")

# Nothing has touched the graph yet; only acceptance applies the actions.
assert len(graph.nodes) == 2
apply_suggestion(graph, suggestion)
print(f"accepted -> {len(graph.nodes)} cards, revision {graph.revision}")

# Wire the new cards up. Labels fall out of the endpoint kinds when omitted.
activity = next(n for n in graph.nodes.values() if n.kind is NodeKind.ACTIVITY)
resource = next(n for n in graph.nodes.values() if n.kind is NodeKind.RESOURCE)
for source in (objective, resource, learners):
    edge = graph.create_edge(source.id, activity.id)
    print(f"edge: {graph.nodes[source.id].title[:20]!r} -{edge.label}-> activity")

# The ledger kept score of the one agent call.
usage = ledger_report(session.ledger)
print(f"\nusage: {usage['calls']} call(s), {usage['input_tokens']} tokens in, "
      f"${usage['cost_dollars']:.4f}")

# Export the linear plan. Sections always appear, filled or not.
print("\n" + export_lesson_plan(graph, "markdown", title=session.task_label).decode())
