/**
 * Node-link canvas: renders a graph snapshot as positioned cards with
 * directed labeled edges, a pannable/zoomable surface, and a mini-map.
 *
 * Rendering is a pure projection of (snapshot, view state, viewport): every
 * render rebuilds the layers from scratch, and all interaction is wired
 * through delegated listeners on the container, so rebuilt elements need no
 * per-element hookup.
 */

import { GraphSnapshot, NodeTag, WireNode } from "./model.js";
import { ViewStateStore } from "./viewstate.js";
import { Viewport, contentBounds } from "./viewport.js";

export interface KindStyle {
  cssClass: string;
  color: string;
  icon: string;
  label: string;
}

/** One distinct icon + color + text label per node kind; color never alone. */
export const KIND_STYLES: Record<NodeTag, KindStyle> = {
  Learner: { cssClass: "kind-learner", color: "#7b5cd6", icon: "☺", label: "Learner" },
  Objective: { cssClass: "kind-objective", color: "#d6604d", icon: "◎", label: "Objective" },
  Strategy: { cssClass: "kind-strategy", color: "#2a9d8f", icon: "⌘", label: "Strategy" },
  Activity: { cssClass: "kind-activity", color: "#e9a23b", icon: "✎", label: "Activity" },
  Resource: { cssClass: "kind-resource", color: "#4a90d9", icon: "☗", label: "Resource" },
  Evaluation: { cssClass: "kind-evaluation", color: "#6d9e3f", icon: "✓", label: "Evaluation" },
};

export const NODE_WIDTH = 180;
export const NODE_HEADER_HEIGHT = 30;

export interface CanvasCallbacks {
  onMoveNode?: (nodeId: string, x: number, y: number) => void;
  onDeleteNode?: (nodeId: string) => void;
  onEditNode?: (nodeId: string, patch: { title?: string; description?: string }) => void;
  onRefineNode?: (nodeId: string) => void;
  onSplitNode?: (nodeId: string) => void;
}

interface DragState {
  nodeId: string;
  startClientX: number;
  startClientY: number;
  startWorldX: number;
  startWorldY: number;
  moved: boolean;
}

export class CanvasView {
  readonly root: HTMLElement;
  readonly viewState = new ViewStateStore();
  readonly viewport: Viewport;

  private snapshot: GraphSnapshot = { nodes: [], edges: [], revision: 0 };
  private callbacks: CanvasCallbacks;
  private drag: DragState | null = null;
  private panning: { startX: number; startY: number } | null = null;
  private changedIds = new Set<string>();

  constructor(root: HTMLElement, callbacks: CanvasCallbacks = {}, viewport?: Viewport) {
    this.root = root;
    this.callbacks = callbacks;
    this.viewport = viewport ?? new Viewport();
    this.root.classList.add("canvas-root");
    this.bindEvents();
  }

  currentSnapshot(): GraphSnapshot {
    return this.snapshot;
  }

  /** Mark nodes changed by an accepted suggestion so the render flags them. */
  markChanged(nodeIds: string[]): void {
    this.changedIds = new Set(nodeIds);
  }

  render(snapshot?: GraphSnapshot): void {
    if (snapshot) {
      this.snapshot = snapshot;
      this.viewState.retainOnly(new Set(snapshot.nodes.map((n) => n.id)));
    }
    this.root.textContent = "";
    this.root.appendChild(this.renderEdgeLayer());
    this.root.appendChild(this.renderNodeLayer());
    this.root.appendChild(this.renderMinimap());
  }

  // -- layers -------------------------------------------------------------------

  private nodeAnchor(node: WireNode): { x: number; y: number } {
    const screen = this.viewport.toScreen({ x: node.x, y: node.y });
    return {
      x: screen.x + (NODE_WIDTH * this.viewport.zoom) / 2,
      y: screen.y + NODE_HEADER_HEIGHT * this.viewport.zoom,
    };
  }

  private renderEdgeLayer(): SVGSVGElement {
    const svgNs = "http://www.w3.org/2000/svg";
    const svg = document.createElementNS(svgNs, "svg");
    svg.setAttribute("class", "edge-layer");
    svg.setAttribute("width", "100%");
    svg.setAttribute("height", "100%");

    const defs = document.createElementNS(svgNs, "defs");
    const marker = document.createElementNS(svgNs, "marker");
    marker.setAttribute("id", "arrow-head");
    marker.setAttribute("markerWidth", "10");
    marker.setAttribute("markerHeight", "8");
    marker.setAttribute("refX", "9");
    marker.setAttribute("refY", "4");
    marker.setAttribute("orient", "auto");
    const tip = document.createElementNS(svgNs, "path");
    tip.setAttribute("d", "M0,0 L10,4 L0,8 z");
    tip.setAttribute("fill", "#556");
    marker.appendChild(tip);
    defs.appendChild(marker);
    svg.appendChild(defs);

    const byId = new Map(this.snapshot.nodes.map((n) => [n.id, n]));
    for (const edge of this.snapshot.edges) {
      const source = byId.get(edge.source);
      const target = byId.get(edge.target);
      if (!source || !target) continue;
      const a = this.nodeAnchor(source);
      const b = this.nodeAnchor(target);

      const group = document.createElementNS(svgNs, "g");
      group.setAttribute("class", "edge");
      group.setAttribute("data-edge-id", edge.id);
      group.setAttribute("data-source", edge.source);
      group.setAttribute("data-target", edge.target);

      const line = document.createElementNS(svgNs, "line");
      line.setAttribute("x1", String(a.x));
      line.setAttribute("y1", String(a.y));
      line.setAttribute("x2", String(b.x));
      line.setAttribute("y2", String(b.y));
      line.setAttribute("marker-end", "url(#arrow-head)");
      group.appendChild(line);

      const label = document.createElementNS(svgNs, "text");
      label.setAttribute("class", "edge-label");
      label.setAttribute("x", String((a.x + b.x) / 2));
      label.setAttribute("y", String((a.y + b.y) / 2 - 4));
      label.textContent = edge.label;
      group.appendChild(label);

      svg.appendChild(group);
    }
    return svg;
  }

  private renderNodeLayer(): HTMLElement {
    const layer = document.createElement("div");
    layer.className = "node-layer";
    for (const node of this.snapshot.nodes) {
      layer.appendChild(this.renderNode(node));
    }
    return layer;
  }

  private renderNode(node: WireNode): HTMLElement {
    const style = KIND_STYLES[node.tag];
    const state = this.viewState.stateOf(node.id);
    const el = document.createElement("div");
    el.className = `node ${style.cssClass} state-${state.replace(/_/g, "-")}`;
    if (this.changedIds.has(node.id)) el.classList.add("changed");
    el.dataset.nodeId = node.id;
    const screen = this.viewport.toScreen({ x: node.x, y: node.y });
    el.style.left = `${screen.x}px`;
    el.style.top = `${screen.y}px`;
    el.style.width = `${NODE_WIDTH * this.viewport.zoom}px`;

    const banner = document.createElement("div");
    banner.className = "banner";
    banner.style.background = style.color;
    const icon = document.createElement("span");
    icon.className = "kind-icon";
    icon.textContent = style.icon;
    const kindLabel = document.createElement("span");
    kindLabel.className = "kind-label";
    kindLabel.textContent = style.label;
    banner.append(icon, kindLabel);
    el.appendChild(banner);

    const title = document.createElement("div");
    title.className = "title";
    title.textContent = node.title;
    el.appendChild(title);

    if (state === "expanded") {
      el.appendChild(this.renderEditor(node));
    } else if (node.description) {
      const summary = document.createElement("div");
      summary.className = "summary";
      summary.textContent =
        node.description.length > 80 ? `${node.description.slice(0, 80)}…` : node.description;
      el.appendChild(summary);
    }

    if (state === "hovered") {
      const affordance = document.createElement("div");
      affordance.className = "affordances";
      const more = document.createElement("button");
      more.className = "more";
      more.textContent = "⋯";
      more.title = "Options";
      affordance.appendChild(more);
      el.appendChild(affordance);
    }

    if (state === "selected_menu") {
      el.appendChild(this.renderMenu());
    }
    return el;
  }

  private renderEditor(node: WireNode): HTMLElement {
    const editor = document.createElement("div");
    editor.className = "editor";
    const titleInput = document.createElement("input");
    titleInput.className = "title-input";
    titleInput.value = node.title;
    const description = document.createElement("textarea");
    description.className = "description-input";
    description.value = node.description;
    const save = document.createElement("button");
    save.className = "save";
    save.textContent = "Save";
    const close = document.createElement("button");
    close.className = "close";
    close.textContent = "Close";
    editor.append(titleInput, description, save, close);
    return editor;
  }

  private renderMenu(): HTMLElement {
    const menu = document.createElement("div");
    menu.className = "context-menu";
    for (const [action, text] of [
      ["edit", "Edit"],
      ["delete", "Delete"],
      ["split", "Split"],
      ["refine", "Refine"],
    ]) {
      const button = document.createElement("button");
      button.className = `menu-${action}`;
      button.dataset.menuAction = action;
      button.textContent = text;
      menu.appendChild(button);
    }
    return menu;
  }

  private renderMinimap(): HTMLElement {
    const minimap = document.createElement("div");
    minimap.className = "minimap";
    const bounds = contentBounds(this.snapshot.nodes.map((n) => ({ x: n.x, y: n.y })));
    for (const node of this.snapshot.nodes) {
      const dot = document.createElement("div");
      dot.className = `minimap-dot ${KIND_STYLES[node.tag].cssClass}`;
      dot.style.background = KIND_STYLES[node.tag].color;
      dot.style.left = `${(100 * (node.x - bounds.x)) / (bounds.width || 1)}%`;
      dot.style.top = `${(100 * (node.y - bounds.y)) / (bounds.height || 1)}%`;
      minimap.appendChild(dot);
    }
    const rect = this.viewport.minimapRect(bounds);
    const view = document.createElement("div");
    view.className = "minimap-view";
    view.style.left = `${100 * rect.x}%`;
    view.style.top = `${100 * rect.y}%`;
    view.style.width = `${100 * rect.width}%`;
    view.style.height = `${100 * rect.height}%`;
    minimap.appendChild(view);
    return minimap;
  }

  // -- interaction -----------------------------------------------------------------

  private nodeIdOf(target: EventTarget | null): string | null {
    if (!(target instanceof Element)) return null;
    const el = target.closest("[data-node-id]");
    return el instanceof HTMLElement ? (el.dataset.nodeId ?? null) : null;
  }

  private edgeOf(target: EventTarget | null): { source: string; target: string } | null {
    if (!(target instanceof Element)) return null;
    const el = target.closest("[data-edge-id]");
    if (!el) return null;
    return {
      source: el.getAttribute("data-source") ?? "",
      target: el.getAttribute("data-target") ?? "",
    };
  }

  private bindEvents(): void {
    this.root.addEventListener("mouseover", (event) => {
      const edge = this.edgeOf(event.target);
      if (edge) {
        this.viewState.highlightConnected([edge.source, edge.target]);
        this.render();
        return;
      }
      const nodeId = this.nodeIdOf(event.target);
      if (nodeId) {
        this.viewState.hover(nodeId);
        this.render();
      }
    });

    this.root.addEventListener("mouseout", (event) => {
      if (this.edgeOf(event.target)) {
        this.viewState.clearConnectedHighlight();
        this.render();
        return;
      }
      const nodeId = this.nodeIdOf(event.target);
      if (nodeId) {
        this.viewState.unhover(nodeId);
        this.render();
      }
    });

    this.root.addEventListener("dblclick", (event) => {
      const nodeId = this.nodeIdOf(event.target);
      if (nodeId) {
        this.viewState.expand(nodeId);
        this.render();
      }
    });

    // Left and right click both open the node menu.
    this.root.addEventListener("contextmenu", (event) => {
      const nodeId = this.nodeIdOf(event.target);
      if (nodeId) {
        event.preventDefault();
        this.viewState.openMenu(nodeId);
        this.render();
      }
    });

    this.root.addEventListener("click", (event) => {
      const target = event.target;
      if (target instanceof HTMLElement && target.dataset.menuAction) {
        this.runMenuAction(target.dataset.menuAction, this.nodeIdOf(target));
        return;
      }
      if (target instanceof HTMLElement && target.classList.contains("save")) {
        this.saveEditor(target);
        return;
      }
      if (target instanceof HTMLElement && target.classList.contains("close")) {
        const nodeId = this.nodeIdOf(target);
        if (nodeId) {
          this.viewState.collapse(nodeId);
          this.render();
        }
        return;
      }
      if (target instanceof HTMLElement && target.classList.contains("more")) {
        const nodeId = this.nodeIdOf(target);
        if (nodeId) {
          this.viewState.openMenu(nodeId);
          this.render();
        }
        return;
      }
      const nodeId = this.nodeIdOf(target);
      if (nodeId) {
        if (this.drag?.moved) return;
        this.viewState.openMenu(nodeId);
        this.render();
      } else {
        this.viewState.closeMenus();
        this.render();
      }
    });

    this.root.addEventListener("mousedown", (event) => {
      const nodeId = this.nodeIdOf(event.target);
      if (nodeId) {
        const node = this.snapshot.nodes.find((n) => n.id === nodeId);
        if (!node) return;
        if (event.target instanceof HTMLElement) {
          const tag = event.target.tagName;
          if (tag === "TEXTAREA" || tag === "INPUT" || tag === "BUTTON") return;
        }
        this.drag = {
          nodeId,
          startClientX: event.clientX,
          startClientY: event.clientY,
          startWorldX: node.x,
          startWorldY: node.y,
          moved: false,
        };
      } else {
        this.panning = { startX: event.clientX, startY: event.clientY };
      }
    });

    this.root.addEventListener("mousemove", (event) => {
      if (this.drag) {
        const node = this.snapshot.nodes.find((n) => n.id === this.drag!.nodeId);
        if (!node) return;
        node.x = this.drag.startWorldX + (event.clientX - this.drag.startClientX) / this.viewport.zoom;
        node.y = this.drag.startWorldY + (event.clientY - this.drag.startClientY) / this.viewport.zoom;
        this.drag.moved = true;
        this.render();
      } else if (this.panning) {
        this.viewport.panBy(event.clientX - this.panning.startX, event.clientY - this.panning.startY);
        this.panning = { startX: event.clientX, startY: event.clientY };
        this.render();
      }
    });

    this.root.addEventListener("mouseup", () => {
      if (this.drag?.moved) {
        const node = this.snapshot.nodes.find((n) => n.id === this.drag!.nodeId);
        if (node) this.callbacks.onMoveNode?.(node.id, node.x, node.y);
        // Keep drag.moved through the click that follows mouseup, so a drag
        // release does not also open the node menu.
        setTimeout(() => (this.drag = null), 0);
      } else {
        this.drag = null;
      }
      this.panning = null;
    });

    this.root.addEventListener("wheel", (event) => {
      event.preventDefault();
      const factor = event.deltaY < 0 ? 1.1 : 1 / 1.1;
      this.viewport.zoomAt({ x: event.clientX, y: event.clientY }, factor);
      this.render();
    });
  }

  private runMenuAction(action: string, nodeId: string | null): void {
    if (!nodeId) return;
    this.viewState.closeMenus();
    if (action === "edit") {
      this.viewState.expand(nodeId);
    } else if (action === "delete") {
      this.callbacks.onDeleteNode?.(nodeId);
    } else if (action === "split") {
      this.callbacks.onSplitNode?.(nodeId);
    } else if (action === "refine") {
      this.callbacks.onRefineNode?.(nodeId);
    }
    this.render();
  }

  private saveEditor(saveButton: HTMLElement): void {
    const nodeId = this.nodeIdOf(saveButton);
    const editor = saveButton.closest(".editor");
    if (!nodeId || !editor) return;
    const title = editor.querySelector<HTMLInputElement>(".title-input")?.value ?? "";
    const description = editor.querySelector<HTMLTextAreaElement>(".description-input")?.value ?? "";
    this.callbacks.onEditNode?.(nodeId, { title, description });
    this.viewState.collapse(nodeId);
    this.render();
  }
}
