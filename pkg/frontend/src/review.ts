/**
 * Before/after review dialogs for the node-scoped agents.
 *
 * Refine shows the original card next to the proposed rewrite with a single
 * accept. Split shows the original next to selectable child cards; accepting
 * applies exactly the checked children. Cancel closes without any request.
 */

import { LessonMapApi } from "./api.js";
import { GraphSnapshot, SuggestionWire, WireNode, suggestionItemCount } from "./model.js";

export interface ReviewCallbacks {
  onGraphChanged?: (graph: GraphSnapshot, changedNodeIds: string[]) => void;
  onError?: (error: unknown) => void;
}

export class ReviewDialog {
  readonly root: HTMLElement;
  private readonly api: LessonMapApi;
  private readonly sessionId: string;
  private readonly callbacks: ReviewCallbacks;

  constructor(
    root: HTMLElement,
    api: LessonMapApi,
    sessionId: string,
    callbacks: ReviewCallbacks = {},
  ) {
    this.root = root;
    this.api = api;
    this.sessionId = sessionId;
    this.callbacks = callbacks;
    this.root.classList.add("review-host");
  }

  isOpen(): boolean {
    return this.root.querySelector(".review-dialog") !== null;
  }

  close(): void {
    this.root.textContent = "";
  }

  async openRefine(nodeId: string, instruction?: string): Promise<void> {
    try {
      const { suggestion, original } = await this.api.refine(this.sessionId, nodeId, instruction);
      this.renderDialog("refine", original, suggestion);
    } catch (error) {
      this.callbacks.onError?.(error);
    }
  }

  async openSplit(nodeId: string, instruction?: string): Promise<void> {
    try {
      const { suggestion, original } = await this.api.split(this.sessionId, nodeId, instruction);
      this.renderDialog("split", original, suggestion);
    } catch (error) {
      this.callbacks.onError?.(error);
    }
  }

  private renderDialog(mode: "refine" | "split", original: WireNode, suggestion: SuggestionWire): void {
    this.close();
    const dialog = document.createElement("div");
    dialog.className = `review-dialog ${mode}-review`;
    dialog.dataset.suggestionId = suggestion.id;

    const narration = document.createElement("p");
    narration.className = "narration";
    narration.textContent = suggestion.narration;
    dialog.appendChild(narration);

    const columns = document.createElement("div");
    columns.className = "review-columns";
    columns.appendChild(this.renderOriginal(original));
    columns.appendChild(
      mode === "refine" ? this.renderProposed(suggestion) : this.renderChildren(suggestion),
    );
    dialog.appendChild(columns);

    const controls = document.createElement("div");
    controls.className = "review-controls";
    const accept = document.createElement("button");
    accept.className = "accept";
    accept.textContent = mode === "refine" ? "Accept rewrite" : "Apply selected";
    accept.addEventListener("click", () => void this.accept(dialog, suggestion));
    const cancel = document.createElement("button");
    cancel.className = "cancel";
    cancel.textContent = "Cancel";
    cancel.addEventListener("click", () => this.close());
    controls.append(accept, cancel);
    dialog.appendChild(controls);

    this.root.appendChild(dialog);
  }

  /** The current card content, shown verbatim. */
  private renderOriginal(original: WireNode): HTMLElement {
    const panel = document.createElement("div");
    panel.className = "original-panel";
    const heading = document.createElement("h4");
    heading.textContent = "Current";
    const title = document.createElement("div");
    title.className = "original-title";
    title.textContent = original.title;
    const description = document.createElement("div");
    description.className = "original-description";
    description.textContent = original.description;
    panel.append(heading, title, description);
    return panel;
  }

  private renderProposed(suggestion: SuggestionWire): HTMLElement {
    const panel = document.createElement("div");
    panel.className = "proposed-panel";
    const heading = document.createElement("h4");
    heading.textContent = "Proposed";
    panel.appendChild(heading);
    if (suggestion.new_node) {
      const title = document.createElement("div");
      title.className = "proposed-title";
      title.textContent = suggestion.new_node.title;
      const description = document.createElement("div");
      description.className = "proposed-description";
      description.textContent = suggestion.new_node.description;
      panel.append(title, description);
    }
    return panel;
  }

  private renderChildren(suggestion: SuggestionWire): HTMLElement {
    const panel = document.createElement("div");
    panel.className = "children-panel";
    const heading = document.createElement("h4");
    heading.textContent = "Split into";
    panel.appendChild(heading);
    (suggestion.new_nodes ?? []).forEach((child, index) => {
      const row = document.createElement("label");
      row.className = "child-option";
      const box = document.createElement("input");
      box.type = "checkbox";
      box.checked = true;
      box.dataset.itemIndex = String(index);
      const text = document.createElement("span");
      text.textContent = `${child.tag}: ${child.title}`;
      row.append(box, text);
      panel.appendChild(row);
    });
    return panel;
  }

  private async accept(dialog: HTMLElement, suggestion: SuggestionWire): Promise<void> {
    const boxes = Array.from(dialog.querySelectorAll<HTMLInputElement>("input[type=checkbox]"));
    const checked = boxes.filter((b) => b.checked).map((b) => Number(b.dataset.itemIndex));
    const selection =
      boxes.length > 0 && checked.length < suggestionItemCount(suggestion) ? checked : null;
    try {
      const result = await this.api.resolve(this.sessionId, suggestion.id, "accept", selection);
      this.close();
      this.callbacks.onGraphChanged?.(result.graph, []);
    } catch (error) {
      this.callbacks.onError?.(error);
    }
  }
}
