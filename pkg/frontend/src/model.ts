/**
 * Wire types for the /v1 design-session API.
 *
 * These mirror the server's JSON shapes exactly; the client never invents
 * graph state of its own, it only re-renders what the server returns.
 */

export const NODE_TAGS = [
  "Learner",
  "Objective",
  "Strategy",
  "Activity",
  "Resource",
  "Evaluation",
] as const;

export type NodeTag = (typeof NODE_TAGS)[number];

export interface WireNode {
  id: string;
  tag: NodeTag;
  title: string;
  description: string;
  x: number;
  y: number;
  provenance: string;
  created_at: number;
}

export interface WireEdge {
  id: string;
  source: string;
  target: string;
  label: string;
}

export interface GraphSnapshot {
  nodes: WireNode[];
  edges: WireEdge[];
  revision: number;
}

export interface ChatTurn {
  index: number;
  author: "user" | "assistant";
  text: string;
  timestamp: number;
}

/** One reviewable action inside a conversational-agent suggestion. */
export interface ActionWire {
  option: "add" | "modify" | "create_edge";
  type?: NodeTag;
  title?: string;
  description?: string;
  card_id?: string;
  source_id?: string;
  target_id?: string;
  label?: string;
}

export interface NewNodeWire {
  id?: string;
  title: string;
  description: string;
  tag: NodeTag;
}

/** Union wire shape for all three agent payloads; exactly one flavor set. */
export interface SuggestionWire {
  id: string;
  origin: string;
  status: string;
  narration: string;
  created_at: number;
  actions?: ActionWire[];
  new_node?: NewNodeWire;
  old_node_id?: string;
  new_nodes?: NewNodeWire[];
}

export interface SessionDetail {
  schema_version: number;
  id: string;
  task_label: string;
  created_at: number;
  graph: GraphSnapshot;
  chat: ChatTurn[];
  pending_suggestions: SuggestionWire[];
}

export interface SessionSummary {
  id: string;
  task_label: string;
  created_at: number;
}

export interface HintWire {
  kind: NodeTag;
  category: string;
  title: string;
  description: string;
}

export interface MetricsWire {
  node_to_edge_ratio: number | null;
  avg_consecutive_node_distance_px: number | null;
  total_turns: number;
  avg_user_message_length_chars: number | null;
  negative_keyword_count: number;
  suggestion_acceptance_rate: number | null;
  suggestion_modification_rate: number | null;
}

export interface ChatResponse {
  assistant_narration: string;
  suggestion: SuggestionWire | null;
}

export interface NodeAgentResponse {
  suggestion: SuggestionWire;
  original: WireNode;
}

export interface ResolveResponse {
  suggestion: SuggestionWire;
  graph: GraphSnapshot;
}

/** Number of independently selectable items a suggestion carries. */
export function suggestionItemCount(suggestion: SuggestionWire): number {
  if (suggestion.actions) return suggestion.actions.length;
  if (suggestion.new_nodes) return suggestion.new_nodes.length;
  return suggestion.new_node ? 1 : 0;
}
