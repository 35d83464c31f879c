import { beforeEach, describe, expect, it } from "vitest";

import { CanvasView, KIND_STYLES } from "../src/canvas.js";
import { GraphSnapshot, NODE_TAGS, WireNode } from "../src/model.js";

let counter = 0;

function node(tag: WireNode["tag"], title: string, x = 0, y = 0): WireNode {
  counter += 1;
  return {
    id: `n${counter}`,
    tag,
    title,
    description: `${title} in detail`,
    x,
    y,
    provenance: "user",
    created_at: 1700000000,
  };
}

function sixKindFixture(): GraphSnapshot {
  const nodes = NODE_TAGS.map((tag, i) => node(tag, `${tag} card`, i * 200, i * 90));
  return {
    nodes,
    edges: [
      { id: "e1", source: nodes[4].id, target: nodes[3].id, label: "supports" },
      { id: "e2", source: nodes[1].id, target: nodes[3].id, label: "guides" },
    ],
    revision: 3,
  };
}

function fire(el: Element, type: string, init: MouseEventInit = {}): void {
  el.dispatchEvent(new MouseEvent(type, { bubbles: true, cancelable: true, ...init }));
}

describe("CanvasView", () => {
  let host: HTMLElement;

  beforeEach(() => {
    counter = 0;
    document.body.innerHTML = "";
    host = document.createElement("div");
    document.body.appendChild(host);
  });

  it("renders six visually distinct kinds with icon, color, and text label", () => {
    const view = new CanvasView(host);
    view.render(sixKindFixture());
    const cards = Array.from(host.querySelectorAll<HTMLElement>(".node"));
    expect(cards).toHaveLength(6);

    const classes = new Set<string>();
    const colors = new Set<string>();
    const icons = new Set<string>();
    const labels = new Set<string>();
    for (const card of cards) {
      const kindClass = Array.from(card.classList).find((c) => c.startsWith("kind-"));
      expect(kindClass).toBeDefined();
      classes.add(kindClass!);
      colors.add(card.querySelector<HTMLElement>(".banner")!.style.background);
      icons.add(card.querySelector(".kind-icon")!.textContent ?? "");
      labels.add(card.querySelector(".kind-label")!.textContent ?? "");
    }
    expect(classes.size).toBe(6);
    expect(colors.size).toBe(6);
    expect(icons.size).toBe(6);
    expect(labels).toEqual(new Set(NODE_TAGS));
  });

  it("draws directed labeled edges", () => {
    const view = new CanvasView(host);
    view.render(sixKindFixture());
    const edges = Array.from(host.querySelectorAll("g.edge"));
    expect(edges).toHaveLength(2);
    for (const edge of edges) {
      expect(edge.querySelector("line")!.getAttribute("marker-end")).toBe("url(#arrow-head)");
    }
    const labels = edges.map((e) => e.querySelector(".edge-label")!.textContent);
    expect(labels.sort()).toEqual(["guides", "supports"]);
  });

  it("is a pure projection: same inputs render identical markup", () => {
    const snapshot = sixKindFixture();
    const view = new CanvasView(host);
    view.render(snapshot);
    view.viewState.hover(snapshot.nodes[0].id);
    view.render();
    const first = host.innerHTML;
    view.render();
    expect(host.innerHTML).toBe(first);

    const other = document.createElement("div");
    document.body.appendChild(other);
    const twin = new CanvasView(other);
    twin.render(snapshot);
    twin.viewState.hover(snapshot.nodes[0].id);
    twin.render();
    expect(other.innerHTML).toBe(first);
  });

  it("reveals affordances on hover and clears on mouseout", () => {
    const snapshot = sixKindFixture();
    const view = new CanvasView(host);
    view.render(snapshot);
    const id = snapshot.nodes[0].id;
    fire(host.querySelector(`[data-node-id="${id}"] .title`)!, "mouseover");
    const hovered = host.querySelector(`[data-node-id="${id}"]`)!;
    expect(hovered.classList.contains("state-hovered")).toBe(true);
    expect(hovered.querySelector(".affordances .more")).not.toBeNull();
    fire(hovered, "mouseout");
    expect(host.querySelector(`[data-node-id="${id}"]`)!.classList.contains("state-default")).toBe(
      true,
    );
  });

  it("expands to an editable description on double click and saves edits", () => {
    const snapshot = sixKindFixture();
    const edits: Array<{ id: string; patch: { title?: string; description?: string } }> = [];
    const view = new CanvasView(host, {
      onEditNode: (id, patch) => edits.push({ id, patch }),
    });
    view.render(snapshot);
    const id = snapshot.nodes[2].id;
    fire(host.querySelector(`[data-node-id="${id}"]`)!, "dblclick");

    const card = host.querySelector(`[data-node-id="${id}"]`)!;
    expect(card.classList.contains("state-expanded")).toBe(true);
    const description = card.querySelector<HTMLTextAreaElement>(".description-input")!;
    expect(description.value).toBe("Strategy card in detail");

    description.value = "Rewritten detail";
    fire(card.querySelector(".save")!, "click");
    expect(edits).toEqual([
      { id, patch: { title: "Strategy card", description: "Rewritten detail" } },
    ]);
  });

  it("opens the action menu on left or right click, one at a time", () => {
    const snapshot = sixKindFixture();
    const view = new CanvasView(host);
    view.render(snapshot);
    const [a, b] = [snapshot.nodes[0].id, snapshot.nodes[1].id];

    fire(host.querySelector(`[data-node-id="${a}"]`)!, "click");
    let menu = host.querySelector(`[data-node-id="${a}"] .context-menu`)!;
    const labels = Array.from(menu.querySelectorAll("button")).map((el) => el.textContent);
    expect(labels).toEqual(["Edit", "Delete", "Split", "Refine"]);

    fire(host.querySelector(`[data-node-id="${b}"]`)!, "contextmenu");
    expect(host.querySelectorAll(".context-menu")).toHaveLength(1);
    expect(host.querySelector(`[data-node-id="${b}"] .context-menu`)).not.toBeNull();
  });

  it("routes menu actions to the callbacks", () => {
    const snapshot = sixKindFixture();
    const seen: string[] = [];
    const view = new CanvasView(host, {
      onDeleteNode: (id) => seen.push(`delete:${id}`),
      onSplitNode: (id) => seen.push(`split:${id}`),
      onRefineNode: (id) => seen.push(`refine:${id}`),
    });
    view.render(snapshot);
    const id = snapshot.nodes[3].id;
    for (const action of ["delete", "split", "refine"]) {
      fire(host.querySelector(`[data-node-id="${id}"]`)!, "click");
      fire(host.querySelector(`[data-node-id="${id}"] .menu-${action}`)!, "click");
    }
    expect(seen).toEqual([`delete:${id}`, `split:${id}`, `refine:${id}`]);
  });

  it("highlights both endpoints while hovering an edge", () => {
    const snapshot = sixKindFixture();
    const view = new CanvasView(host);
    view.render(snapshot);
    const edge = host.querySelector('g.edge[data-edge-id="e1"]')!;
    const source = edge.getAttribute("data-source")!;
    const target = edge.getAttribute("data-target")!;

    fire(host.querySelector('g.edge[data-edge-id="e1"] line')!, "mouseover");
    expect(
      host.querySelector(`[data-node-id="${source}"]`)!.classList.contains(
        "state-connected-highlight",
      ),
    ).toBe(true);
    expect(
      host.querySelector(`[data-node-id="${target}"]`)!.classList.contains(
        "state-connected-highlight",
      ),
    ).toBe(true);

    fire(host.querySelector('g.edge[data-edge-id="e1"] line')!, "mouseout");
    expect(host.querySelectorAll(".state-connected-highlight")).toHaveLength(0);
  });

  it("drags a node and reports the final world position", () => {
    const snapshot = sixKindFixture();
    const moves: Array<[string, number, number]> = [];
    const view = new CanvasView(host, {
      onMoveNode: (id, x, y) => moves.push([id, x, y]),
    });
    view.render(snapshot);
    const id = snapshot.nodes[0].id;

    fire(host.querySelector(`[data-node-id="${id}"] .title`)!, "mousedown", {
      clientX: 10,
      clientY: 10,
    });
    fire(host, "mousemove", { clientX: 60, clientY: 40 });
    fire(host, "mouseup");

    expect(moves).toEqual([[id, 50, 30]]);
    const style = host.querySelector<HTMLElement>(`[data-node-id="${id}"]`)!.style;
    expect(style.left).toBe("50px");
    expect(style.top).toBe("30px");
  });

  it("renders the minimap with a view rectangle and kind dots", () => {
    const view = new CanvasView(host);
    view.render(sixKindFixture());
    expect(host.querySelectorAll(".minimap")).toHaveLength(1);
    expect(host.querySelectorAll(".minimap-dot")).toHaveLength(6);
    expect(host.querySelector(".minimap-view")).not.toBeNull();
  });

  it("marks suggestion-changed nodes on the next render", () => {
    const snapshot = sixKindFixture();
    const view = new CanvasView(host);
    view.render(snapshot);
    view.markChanged([snapshot.nodes[5].id]);
    view.render(snapshot);
    const changed = host.querySelectorAll(".node.changed");
    expect(changed).toHaveLength(1);
    expect((changed[0] as HTMLElement).dataset.nodeId).toBe(snapshot.nodes[5].id);
  });

  it("distinct kind styles are also distinct in the style table itself", () => {
    const colors = new Set(Object.values(KIND_STYLES).map((s) => s.color));
    const icons = new Set(Object.values(KIND_STYLES).map((s) => s.icon));
    const classes = new Set(Object.values(KIND_STYLES).map((s) => s.cssClass));
    expect(colors.size).toBe(6);
    expect(icons.size).toBe(6);
    expect(classes.size).toBe(6);
  });
});
