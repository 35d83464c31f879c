/**
 * Chat panel: conversation bubbles with the whole-graph agent, plus review
 * cards for its suggestions. Nothing reaches the canvas until the user
 * resolves a card; accept posts the checked action indices, reject discards.
 */

import { ApiError, LessonMapApi } from "./api.js";
import { GraphSnapshot, SuggestionWire, suggestionItemCount } from "./model.js";

export interface ChatCallbacks {
  /** Fired with the fresh snapshot after a resolve round-trip. */
  onGraphChanged?: (graph: GraphSnapshot, changedNodeIds: string[]) => void;
}

export class ChatPanel {
  readonly root: HTMLElement;
  private readonly api: LessonMapApi;
  private readonly sessionId: string;
  private readonly callbacks: ChatCallbacks;
  private readonly log: HTMLElement;
  private readonly input: HTMLTextAreaElement;
  private readonly sendButton: HTMLButtonElement;

  constructor(
    root: HTMLElement,
    api: LessonMapApi,
    sessionId: string,
    callbacks: ChatCallbacks = {},
  ) {
    this.root = root;
    this.api = api;
    this.sessionId = sessionId;
    this.callbacks = callbacks;
    this.root.classList.add("chat-panel");

    this.log = document.createElement("div");
    this.log.className = "chat-log";
    const composer = document.createElement("div");
    composer.className = "composer";
    this.input = document.createElement("textarea");
    this.input.className = "chat-input";
    this.input.placeholder = "Ask for design help…";
    this.sendButton = document.createElement("button");
    this.sendButton.className = "chat-send";
    this.sendButton.textContent = "Send";
    this.sendButton.addEventListener("click", () => void this.send());
    composer.append(this.input, this.sendButton);
    this.root.append(this.log, composer);
  }

  addBubble(author: "user" | "assistant", text: string): void {
    const bubble = document.createElement("div");
    bubble.className = `bubble ${author}`;
    bubble.textContent = text;
    this.log.appendChild(bubble);
  }

  async send(text?: string): Promise<void> {
    const message = (text ?? this.input.value).trim();
    if (!message) return;
    this.input.value = "";
    this.addBubble("user", message);
    this.sendButton.disabled = true;
    try {
      const reply = await this.api.chat(this.sessionId, message);
      this.addBubble("assistant", reply.assistant_narration);
      if (reply.suggestion) this.showSuggestion(reply.suggestion);
    } catch (error) {
      this.showError(error);
    } finally {
      this.sendButton.disabled = false;
    }
  }

  /** Render a pending suggestion as a reviewable card with checkboxes. */
  showSuggestion(suggestion: SuggestionWire): void {
    const card = document.createElement("div");
    card.className = "suggestion-card";
    card.dataset.suggestionId = suggestion.id;

    const heading = document.createElement("div");
    heading.className = "suggestion-heading";
    heading.textContent = `Suggestion from ${suggestion.origin}`;
    card.appendChild(heading);

    const items = this.describeItems(suggestion);
    const list = document.createElement("div");
    list.className = "suggestion-items";
    items.forEach((text, index) => {
      const row = document.createElement("label");
      row.className = "suggestion-item";
      const box = document.createElement("input");
      box.type = "checkbox";
      box.checked = true;
      box.dataset.itemIndex = String(index);
      const span = document.createElement("span");
      span.textContent = text;
      row.append(box, span);
      list.appendChild(row);
    });
    card.appendChild(list);

    const controls = document.createElement("div");
    controls.className = "suggestion-controls";
    const accept = document.createElement("button");
    accept.className = "accept";
    accept.textContent = "Accept";
    accept.addEventListener("click", () => void this.resolveCard(card, suggestion, "accept"));
    const reject = document.createElement("button");
    reject.className = "reject";
    reject.textContent = "Reject";
    reject.addEventListener("click", () => void this.resolveCard(card, suggestion, "reject"));
    controls.append(accept, reject);
    card.appendChild(controls);

    this.log.appendChild(card);
  }

  private describeItems(suggestion: SuggestionWire): string[] {
    if (suggestion.actions) {
      return suggestion.actions.map((action) => {
        if (action.option === "add") return `Add ${action.type}: ${action.title}`;
        if (action.option === "modify") return `Modify card ${action.card_id}: ${action.title}`;
        return `Link ${action.source_id} → ${action.target_id} (${action.label})`;
      });
    }
    if (suggestion.new_nodes) {
      return suggestion.new_nodes.map((child) => `${child.tag}: ${child.title}`);
    }
    if (suggestion.new_node) {
      return [`${suggestion.new_node.tag}: ${suggestion.new_node.title}`];
    }
    return [];
  }

  private async resolveCard(
    card: HTMLElement,
    suggestion: SuggestionWire,
    decision: "accept" | "reject",
  ): Promise<void> {
    const boxes = Array.from(card.querySelectorAll<HTMLInputElement>("input[type=checkbox]"));
    const checked = boxes.filter((b) => b.checked).map((b) => Number(b.dataset.itemIndex));
    const selection =
      decision === "accept" && checked.length < suggestionItemCount(suggestion) ? checked : null;
    try {
      const result = await this.api.resolve(this.sessionId, suggestion.id, decision, selection);
      card.classList.add("resolved", decision === "accept" ? "accepted" : "rejected");
      card.querySelectorAll("button, input").forEach((el) => {
        (el as HTMLButtonElement | HTMLInputElement).disabled = true;
      });
      const changed = decision === "accept" ? changedNodeIds(this.currentIds, result.graph) : [];
      this.currentIds = new Set(result.graph.nodes.map((n) => n.id));
      this.callbacks.onGraphChanged?.(result.graph, changed);
    } catch (error) {
      this.showError(error);
    }
  }

  /** Node ids seen before the last resolve; used to flag newly added cards. */
  private currentIds = new Set<string>();

  syncKnownNodes(graph: GraphSnapshot): void {
    this.currentIds = new Set(graph.nodes.map((n) => n.id));
  }

  showError(error: unknown): void {
    const banner = document.createElement("div");
    banner.className = "error-banner";
    if (error instanceof ApiError) {
      banner.dataset.code = error.code;
      banner.textContent = `${error.code}: ${error.message}`;
    } else {
      banner.textContent = String(error);
    }
    this.log.appendChild(banner);
  }
}

function changedNodeIds(before: Set<string>, after: GraphSnapshot): string[] {
  return after.nodes.filter((n) => !before.has(n.id)).map((n) => n.id);
}
