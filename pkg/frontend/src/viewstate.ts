/**
 * Per-node view state for the canvas.
 *
 * Each node is in exactly one of five states at a time. The store owns the
 * transition rules so the renderer can stay a pure projection of
 * (snapshot, view state, viewport).
 */

export type NodeViewState =
  | "default"
  | "hovered"
  | "expanded"
  | "selected_menu"
  | "connected_highlight";

export const ALL_VIEW_STATES: readonly NodeViewState[] = [
  "default",
  "hovered",
  "expanded",
  "selected_menu",
  "connected_highlight",
];

export class ViewStateStore {
  private states = new Map<string, NodeViewState>();

  /** Every known node is reported in exactly one state; default if untouched. */
  stateOf(nodeId: string): NodeViewState {
    return this.states.get(nodeId) ?? "default";
  }

  /** Hovering reveals affordances but never steals richer states. */
  hover(nodeId: string): void {
    if (this.stateOf(nodeId) === "default") {
      this.states.set(nodeId, "hovered");
    }
  }

  unhover(nodeId: string): void {
    if (this.stateOf(nodeId) === "hovered") {
      this.states.delete(nodeId);
    }
  }

  /** Expanded shows the editable description; reachable from any state. */
  expand(nodeId: string): void {
    this.states.set(nodeId, "expanded");
  }

  collapse(nodeId: string): void {
    if (this.stateOf(nodeId) === "expanded") {
      this.states.delete(nodeId);
    }
  }

  /** At most one context menu is open across the whole canvas. */
  openMenu(nodeId: string): void {
    for (const [id, state] of this.states) {
      if (state === "selected_menu" && id !== nodeId) {
        this.states.delete(id);
      }
    }
    this.states.set(nodeId, "selected_menu");
  }

  closeMenus(): void {
    for (const [id, state] of this.states) {
      if (state === "selected_menu") {
        this.states.delete(id);
      }
    }
  }

  menuNode(): string | null {
    for (const [id, state] of this.states) {
      if (state === "selected_menu") return id;
    }
    return null;
  }

  /**
   * Hovering an edge endpoint highlights both endpoints. Only nodes in
   * passive states (default, hovered) take the highlight, so an open editor
   * or menu is never disturbed.
   */
  highlightConnected(nodeIds: Iterable<string>): void {
    for (const id of nodeIds) {
      const state = this.stateOf(id);
      if (state === "default" || state === "hovered") {
        this.states.set(id, "connected_highlight");
      }
    }
  }

  clearConnectedHighlight(): void {
    for (const [id, state] of this.states) {
      if (state === "connected_highlight") {
        this.states.delete(id);
      }
    }
  }

  /** Drop state for nodes that no longer exist in the snapshot. */
  retainOnly(liveIds: Set<string>): void {
    for (const id of this.states.keys()) {
      if (!liveIds.has(id)) this.states.delete(id);
    }
  }

  reset(): void {
    this.states.clear();
  }
}
