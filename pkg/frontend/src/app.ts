/**
 * Composition root: builds the workbench layout, wires the panels to the
 * API client, and keeps the canvas fresh by polling the revision endpoint.
 * No module side effects; the host page calls mount().
 */

import { FetchLike, LessonMapApi } from "./api.js";
import { CanvasView } from "./canvas.js";
import { ChatPanel } from "./chat.js";
import { HintsPanel } from "./hints.js";
import { GraphSnapshot, SessionDetail } from "./model.js";
import { ReviewDialog } from "./review.js";

export interface AppOptions {
  baseUrl?: string;
  sessionId?: string;
  taskLabel?: string;
  pollIntervalMs?: number;
  fetchImpl?: FetchLike;
}

export interface App {
  api: LessonMapApi;
  session: SessionDetail;
  canvas: CanvasView;
  chat: ChatPanel;
  hints: HintsPanel;
  review: ReviewDialog;
  refresh: () => Promise<void>;
  stop: () => void;
}

export async function mount(container: HTMLElement, options: AppOptions = {}): Promise<App> {
  const api = new LessonMapApi(options.baseUrl ?? "", options.fetchImpl);
  const session = options.sessionId
    ? await api.getSession(options.sessionId)
    : await api.createSession(options.taskLabel ?? "Untitled design");

  container.classList.add("workbench");
  const toolbar = document.createElement("div");
  toolbar.className = "toolbar";
  const main = document.createElement("div");
  main.className = "main";
  const canvasHost = document.createElement("div");
  canvasHost.className = "canvas-host";
  const sidebar = document.createElement("div");
  sidebar.className = "sidebar";
  const chatHost = document.createElement("div");
  const hintsHost = document.createElement("div");
  const reviewHost = document.createElement("div");
  sidebar.append(chatHost, hintsHost);
  main.append(canvasHost, sidebar);
  container.append(toolbar, main, reviewHost);

  let knownRevision = session.graph.revision;

  const canvas = new CanvasView(canvasHost, {
    onMoveNode: (nodeId, x, y) => {
      void api
        .patchNode(session.id, nodeId, { x, y })
        .then((body) => (knownRevision = body.revision))
        .catch(() => void refresh());
    },
    onDeleteNode: (nodeId) => {
      void api
        .deleteNode(session.id, nodeId)
        .then(() => refresh())
        .catch((error) => chat.showError(error));
    },
    onEditNode: (nodeId, patch) => {
      void api
        .patchNode(session.id, nodeId, patch)
        .then(() => refresh())
        .catch((error) => chat.showError(error));
    },
    onRefineNode: (nodeId) => void review.openRefine(nodeId),
    onSplitNode: (nodeId) => void review.openSplit(nodeId),
  });

  const applyGraph = (graph: GraphSnapshot, changed: string[]): void => {
    knownRevision = graph.revision;
    canvas.markChanged(changed);
    canvas.render(graph);
    chat.syncKnownNodes(graph);
  };

  const chat = new ChatPanel(chatHost, api, session.id, { onGraphChanged: applyGraph });
  const review = new ReviewDialog(reviewHost, api, session.id, {
    onGraphChanged: applyGraph,
    onError: (error) => chat.showError(error),
  });
  const hints = new HintsPanel(hintsHost, api, session.id, {
    onNodeAdded: () => void refresh(),
    onError: (error) => chat.showError(error),
  });

  for (const [mode, format, text] of [
    ["lesson_plan", "markdown", "Lesson plan (md)"],
    ["lesson_plan", "html", "Lesson plan (html)"],
    ["cards", "json", "Cards (json)"],
    ["cards", "html", "Cards (html)"],
  ] as const) {
    const button = document.createElement("button");
    button.className = `export-${mode}-${format}`;
    button.textContent = text;
    button.addEventListener("click", () => {
      void api
        .exportDocument(session.id, mode, format)
        .then(({ content, mediaType }) => openDocument(content, mediaType))
        .catch((error) => chat.showError(error));
    });
    toolbar.appendChild(button);
  }

  const refresh = async (): Promise<void> => {
    const detail = await api.getSession(session.id);
    knownRevision = detail.graph.revision;
    canvas.render(detail.graph);
    chat.syncKnownNodes(detail.graph);
  };

  canvas.render(session.graph);
  chat.syncKnownNodes(session.graph);
  for (const turn of session.chat) chat.addBubble(turn.author, turn.text);
  await hints.load();

  const timer = setInterval(() => {
    void api
      .revision(session.id)
      .then((revision) => {
        if (revision !== knownRevision) return refresh();
        return undefined;
      })
      .catch(() => undefined);
  }, options.pollIntervalMs ?? 1000);

  return {
    api,
    session,
    canvas,
    chat,
    hints,
    review,
    refresh,
    stop: () => clearInterval(timer),
  };
}

function openDocument(content: string, mediaType: string): void {
  const blob = new Blob([content], { type: mediaType || "text/plain" });
  const url = URL.createObjectURL(blob);
  window.open(url, "_blank");
}
