import { beforeEach, describe, expect, it } from "vitest";

import { LessonMapApi } from "../src/api.js";
import { ChatPanel } from "../src/chat.js";
import { GraphSnapshot } from "../src/model.js";
import { FakeServer } from "./fake_server.js";

const flush = () => new Promise((resolve) => setTimeout(resolve, 0));

function setup() {
  document.body.innerHTML = "";
  const host = document.createElement("div");
  document.body.appendChild(host);
  const server = new FakeServer();
  const session = server.seedSession([
    { id: "obj1", tag: "Objective", title: "Understand the water cycle" },
  ]);
  const api = new LessonMapApi("", server.fetch);
  const changes: Array<{ graph: GraphSnapshot; changed: string[] }> = [];
  const panel = new ChatPanel(host, api, session.id, {
    onGraphChanged: (graph, changed) => changes.push({ graph, changed }),
  });
  panel.syncKnownNodes(session.graph);
  return { host, server, session, panel, changes };
}

describe("ChatPanel", () => {
  beforeEach(() => {
    document.body.innerHTML = "";
  });

  it("renders user and assistant bubbles for a prose-only reply", async () => {
    const { host, server, panel } = setup();
    server.scriptChat("Sounds like a solid start.");
    await panel.send("Does my outline make sense?");
    const bubbles = Array.from(host.querySelectorAll(".bubble")).map((b) => [
      b.classList.contains("user") ? "user" : "assistant",
      b.textContent,
    ]);
    expect(bubbles).toEqual([
      ["user", "Does my outline make sense?"],
      ["assistant", "Sounds like a solid start."],
    ]);
    expect(host.querySelector(".suggestion-card")).toBeNull();
  });

  it("shows a reviewable card with one checkbox per action", async () => {
    const { host, server, panel } = setup();
    server.scriptChat("Two additions would help.", [
      { option: "add", type: "Activity", title: "Creek walk", description: "Observe erosion." },
      { option: "modify", card_id: "obj1", title: "Explain the water cycle" },
    ]);
    await panel.send("What should I add?");
    const card = host.querySelector(".suggestion-card")!;
    const boxes = card.querySelectorAll("input[type=checkbox]");
    expect(boxes).toHaveLength(2);
    Array.from(boxes).forEach((box) => expect((box as HTMLInputElement).checked).toBe(true));
    expect(card.textContent).toContain("Add Activity: Creek walk");
    expect(card.textContent).toContain("Modify card obj1");
  });

  it("accepting applies all checked actions and reports changed nodes", async () => {
    const { host, server, session, panel, changes } = setup();
    server.scriptChat("Add and adjust.", [
      { option: "add", type: "Activity", title: "Creek walk", description: "Observe erosion." },
      { option: "modify", card_id: "obj1", title: "Explain the water cycle" },
    ]);
    await panel.send("Ideas?");
    (host.querySelector(".suggestion-card .accept") as HTMLButtonElement).click();
    await flush();

    expect(changes).toHaveLength(1);
    const graph = changes[0].graph;
    expect(graph.nodes.map((n) => n.title).sort()).toEqual([
      "Creek walk",
      "Explain the water cycle",
    ]);
    expect(changes[0].changed).toHaveLength(1);
    expect(server.snapshotOf(session.id)).toEqual(graph);
    expect(host.querySelector(".suggestion-card")!.classList.contains("accepted")).toBe(true);
  });

  it("unchecked actions are excluded via the selection indices", async () => {
    const { host, server, session, panel } = setup();
    server.scriptChat("Two options.", [
      { option: "add", type: "Activity", title: "Creek walk", description: "" },
      { option: "add", type: "Resource", title: "Rain gauge", description: "" },
    ]);
    await panel.send("Ideas?");
    const boxes = host.querySelectorAll<HTMLInputElement>(".suggestion-card input");
    boxes[0].checked = false;
    (host.querySelector(".suggestion-card .accept") as HTMLButtonElement).click();
    await flush();

    const resolveCall = server.calls.find((c) => c.url.includes("/resolve"))!;
    expect(resolveCall.body).toEqual({ decision: "accept", selection: [1] });
    const titles = server.snapshotOf(session.id).nodes.map((n) => n.title);
    expect(titles).toContain("Rain gauge");
    expect(titles).not.toContain("Creek walk");
  });

  it("rejecting leaves the graph untouched", async () => {
    const { host, server, session, panel, changes } = setup();
    const before = server.snapshotOf(session.id);
    server.scriptChat("How about this?", [
      { option: "add", type: "Evaluation", title: "Exit quiz", description: "" },
    ]);
    await panel.send("Assess how?");
    (host.querySelector(".suggestion-card .reject") as HTMLButtonElement).click();
    await flush();

    expect(server.snapshotOf(session.id).nodes).toEqual(before.nodes);
    expect(server.snapshotOf(session.id).edges).toEqual(before.edges);
    expect(changes[0].changed).toEqual([]);
    expect(host.querySelector(".suggestion-card")!.classList.contains("rejected")).toBe(true);
  });

  it("shows an error banner with the server code when the agent call fails", async () => {
    const { host, panel } = setup();
    await panel.send("Hello?");
    const banner = host.querySelector<HTMLElement>(".error-banner")!;
    expect(banner.dataset.code).toBe("script_exhausted");
    expect(banner.textContent).toContain("script_exhausted");
  });
});
