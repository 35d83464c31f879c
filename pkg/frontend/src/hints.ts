/**
 * Design-hints panel: a browsable preset library. Clicking a hint only
 * pre-fills the new-card form; nothing is added until the user inserts it,
 * and the insert goes through the normal node endpoint.
 */

import { LessonMapApi } from "./api.js";
import { GraphSnapshot, HintWire, NODE_TAGS, NodeTag } from "./model.js";

export interface HintsCallbacks {
  onGraphChanged?: (graph: GraphSnapshot | null) => void;
  onNodeAdded?: () => void;
  onError?: (error: unknown) => void;
}

export class HintsPanel {
  readonly root: HTMLElement;
  private readonly api: LessonMapApi;
  private readonly sessionId: string;
  private readonly callbacks: HintsCallbacks;

  private readonly filterSelect: HTMLSelectElement;
  private readonly list: HTMLElement;
  private readonly tagSelect: HTMLSelectElement;
  private readonly titleInput: HTMLInputElement;
  private readonly descriptionInput: HTMLTextAreaElement;

  constructor(
    root: HTMLElement,
    api: LessonMapApi,
    sessionId: string,
    callbacks: HintsCallbacks = {},
  ) {
    this.root = root;
    this.api = api;
    this.sessionId = sessionId;
    this.callbacks = callbacks;
    this.root.classList.add("hints-panel");

    this.filterSelect = document.createElement("select");
    this.filterSelect.className = "hint-filter";
    const all = document.createElement("option");
    all.value = "";
    all.textContent = "All kinds";
    this.filterSelect.appendChild(all);
    for (const tag of NODE_TAGS) {
      const option = document.createElement("option");
      option.value = tag;
      option.textContent = tag;
      this.filterSelect.appendChild(option);
    }
    this.filterSelect.addEventListener("change", () => void this.load());

    this.list = document.createElement("div");
    this.list.className = "hint-list";
    this.list.addEventListener("click", (event) => {
      const target = event.target instanceof Element ? event.target.closest(".hint") : null;
      if (target instanceof HTMLElement) this.prefill(target);
    });

    const form = document.createElement("div");
    form.className = "new-node-form";
    this.tagSelect = document.createElement("select");
    this.tagSelect.className = "form-tag";
    for (const tag of NODE_TAGS) {
      const option = document.createElement("option");
      option.value = tag;
      option.textContent = tag;
      this.tagSelect.appendChild(option);
    }
    this.titleInput = document.createElement("input");
    this.titleInput.className = "form-title";
    this.titleInput.placeholder = "Title";
    this.descriptionInput = document.createElement("textarea");
    this.descriptionInput.className = "form-description";
    this.descriptionInput.placeholder = "Description";
    const insert = document.createElement("button");
    insert.className = "form-insert";
    insert.textContent = "Add to canvas";
    insert.addEventListener("click", () => void this.insert());
    form.append(this.tagSelect, this.titleInput, this.descriptionInput, insert);

    this.root.append(this.filterSelect, this.list, form);
  }

  async load(): Promise<void> {
    const kind = (this.filterSelect.value || undefined) as NodeTag | undefined;
    try {
      const hints = await this.api.hints(kind);
      this.renderList(hints);
    } catch (error) {
      this.callbacks.onError?.(error);
    }
  }

  private renderList(hints: HintWire[]): void {
    this.list.textContent = "";
    for (const hint of hints) {
      const item = document.createElement("div");
      item.className = "hint";
      item.dataset.kind = hint.kind;
      item.dataset.title = hint.title;
      item.dataset.description = hint.description;
      const title = document.createElement("div");
      title.className = "hint-title";
      title.textContent = hint.title;
      const meta = document.createElement("div");
      meta.className = "hint-meta";
      meta.textContent = `${hint.kind} · ${hint.category}`;
      item.append(title, meta);
      this.list.appendChild(item);
    }
  }

  /** Copy the hint into the form; the canvas is untouched until Insert. */
  private prefill(hintEl: HTMLElement): void {
    this.tagSelect.value = hintEl.dataset.kind ?? "Activity";
    this.titleInput.value = hintEl.dataset.title ?? "";
    this.descriptionInput.value = hintEl.dataset.description ?? "";
  }

  private async insert(): Promise<void> {
    const title = this.titleInput.value.trim();
    if (!title) return;
    try {
      await this.api.addNode(this.sessionId, {
        tag: this.tagSelect.value as NodeTag,
        title,
        description: this.descriptionInput.value,
      });
      this.titleInput.value = "";
      this.descriptionInput.value = "";
      this.callbacks.onNodeAdded?.();
    } catch (error) {
      this.callbacks.onError?.(error);
    }
  }
}
