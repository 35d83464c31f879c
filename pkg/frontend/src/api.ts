/**
 * Thin HTTP client for the design-session service.
 *
 * Every call goes through /v1; this module is the only place in the client
 * that talks to the network. Errors are normalized to ApiError carrying the
 * server's uniform {code, message} body.
 */

import {
  ChatResponse,
  GraphSnapshot,
  HintWire,
  MetricsWire,
  NodeAgentResponse,
  NodeTag,
  ResolveResponse,
  SessionDetail,
  SessionSummary,
  SuggestionWire,
  WireEdge,
  WireNode,
} from "./model.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  readonly status: number;
  readonly code: string;

  constructor(status: number, code: string, message: string) {
    super(message);
    this.name = "ApiError";
    this.status = status;
    this.code = code;
  }
}

export interface NodeDraft {
  tag: NodeTag;
  title: string;
  description?: string;
  x?: number;
  y?: number;
}

export interface NodePatch {
  tag?: NodeTag;
  title?: string;
  description?: string;
  x?: number;
  y?: number;
}

export interface UsageWire {
  calls: number;
  input_tokens: number;
  output_tokens: number;
  cost_usd: number;
  [key: string]: unknown;
}

async function parseError(response: Response): Promise<ApiError> {
  let code = "unknown_error";
  let message = `HTTP ${response.status}`;
  try {
    const body = (await response.json()) as { code?: string; message?: string };
    if (typeof body.code === "string") code = body.code;
    if (typeof body.message === "string") message = body.message;
  } catch {
    // non-JSON error body; keep the defaults
  }
  return new ApiError(response.status, code, message);
}

export class LessonMapApi {
  private readonly base: string;
  private readonly fetchImpl: FetchLike;

  constructor(baseUrl = "", fetchImpl?: FetchLike) {
    this.base = baseUrl.replace(/\/+$/, "");
    this.fetchImpl = fetchImpl ?? ((url, init) => fetch(url, init));
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method, headers: {} };
    if (body !== undefined) {
      init.headers = { "content-type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const response = await this.fetchImpl(`${this.base}/v1${path}`, init);
    if (!response.ok) throw await parseError(response);
    return (await response.json()) as T;
  }

  // -- sessions ---------------------------------------------------------------

  createSession(taskLabel = ""): Promise<SessionDetail> {
    return this.request("POST", "/sessions", { task_label: taskLabel });
  }

  async listSessions(): Promise<SessionSummary[]> {
    const body = await this.request<{ sessions: SessionSummary[] }>("GET", "/sessions");
    return body.sessions;
  }

  getSession(sessionId: string): Promise<SessionDetail> {
    return this.request("GET", `/sessions/${sessionId}`);
  }

  async revision(sessionId: string): Promise<number> {
    const body = await this.request<{ revision: number }>(
      "GET",
      `/sessions/${sessionId}/revision`,
    );
    return body.revision;
  }

  // -- direct graph edits -------------------------------------------------------

  addNode(sessionId: string, draft: NodeDraft): Promise<{ node: WireNode; revision: number }> {
    return this.request("POST", `/sessions/${sessionId}/nodes`, draft);
  }

  patchNode(
    sessionId: string,
    nodeId: string,
    patch: NodePatch,
  ): Promise<{ node: WireNode; revision: number }> {
    return this.request("PATCH", `/sessions/${sessionId}/nodes/${nodeId}`, patch);
  }

  deleteNode(
    sessionId: string,
    nodeId: string,
  ): Promise<{ deleted_edges: string[]; revision: number }> {
    return this.request("DELETE", `/sessions/${sessionId}/nodes/${nodeId}`);
  }

  addEdge(
    sessionId: string,
    source: string,
    target: string,
    label?: string,
  ): Promise<{ edge: WireEdge; revision: number }> {
    return this.request("POST", `/sessions/${sessionId}/edges`, { source, target, label });
  }

  patchEdge(
    sessionId: string,
    edgeId: string,
    label: string,
  ): Promise<{ edge: WireEdge; revision: number }> {
    return this.request("PATCH", `/sessions/${sessionId}/edges/${edgeId}`, { label });
  }

  deleteEdge(sessionId: string, edgeId: string): Promise<{ revision: number }> {
    return this.request("DELETE", `/sessions/${sessionId}/edges/${edgeId}`);
  }

  // -- agents ---------------------------------------------------------------------

  chat(sessionId: string, text: string): Promise<ChatResponse> {
    return this.request("POST", `/sessions/${sessionId}/chat`, { text });
  }

  refine(sessionId: string, nodeId: string, instruction?: string): Promise<NodeAgentResponse> {
    return this.request("POST", `/sessions/${sessionId}/nodes/${nodeId}/refine`, {
      instruction: instruction ?? null,
    });
  }

  split(sessionId: string, nodeId: string, instruction?: string): Promise<NodeAgentResponse> {
    return this.request("POST", `/sessions/${sessionId}/nodes/${nodeId}/split`, {
      instruction: instruction ?? null,
    });
  }

  resolve(
    sessionId: string,
    suggestionId: string,
    decision: "accept" | "reject",
    selection?: number[] | null,
  ): Promise<ResolveResponse> {
    return this.request("POST", `/sessions/${sessionId}/suggestions/${suggestionId}/resolve`, {
      decision,
      selection: selection ?? null,
    });
  }

  // -- reports and documents ---------------------------------------------------------

  metrics(sessionId: string): Promise<MetricsWire> {
    return this.request("GET", `/sessions/${sessionId}/metrics`);
  }

  usage(sessionId: string): Promise<UsageWire> {
    return this.request("GET", `/sessions/${sessionId}/usage`);
  }

  async exportDocument(
    sessionId: string,
    mode: "lesson_plan" | "cards",
    format: string,
  ): Promise<{ content: string; mediaType: string }> {
    const query = `mode=${encodeURIComponent(mode)}&format=${encodeURIComponent(format)}`;
    const response = await this.fetchImpl(
      `${this.base}/v1/sessions/${sessionId}/export?${query}`,
      { method: "GET" },
    );
    if (!response.ok) throw await parseError(response);
    return {
      content: await response.text(),
      mediaType: response.headers.get("content-type") ?? "",
    };
  }

  async hints(kind?: NodeTag): Promise<HintWire[]> {
    const query = kind ? `?kind=${encodeURIComponent(kind)}` : "";
    const body = await this.request<{ hints: HintWire[] }>("GET", `/hints${query}`);
    return body.hints;
  }
}

export type { SuggestionWire };
