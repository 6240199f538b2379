// Wire types mirroring the service's JSON documents.

export type Role = "system" | "user" | "assistant";
export type Kind = "message" | "note" | "summary";

export interface MemoryDoc {
  id: string;
  role: Role;
  kind: Kind;
  content: string;
  children: string[];
  created_at: number;
}

export interface MemoryRefDoc {
  memory_id: string;
  visible: boolean;
}

export interface AgentConfigDoc {
  model_name: string;
  temperature: number;
  token_budget: number;
}

export interface ConversationDoc {
  id: string;
  title: string;
  agent_config: AgentConfigDoc;
  canvas_position: { x: number; y: number };
  refs: MemoryRefDoc[];
}

export interface WorkspaceDoc {
  schema_version: number;
  id: string;
  revision: number;
  next_memory_seq: number;
  next_conversation_seq: number;
  pool: MemoryDoc[];
  conversations: ConversationDoc[];
}

export interface ContextPreview {
  messages: { role: Role; content: string }[];
  included_ids: string[];
  token_estimate: number;
  budget: number;
  verdict: "ok" | "over_budget";
  excess: number;
}

export interface ApiErrorBody {
  code: string;
  message: string;
  http_status: number;
  excess?: number;
  retry_after?: number;
}

// One rendered memory card, derived purely from server documents.
export interface CardViewModel {
  id: string;
  role: Role;
  kind: Kind;
  content: string;
  visible: boolean;
  shared: boolean; // provenance lists >= 2 conversations
  expandable: boolean; // kind === "summary"
}

export interface PaneViewModel {
  conversationId: string;
  title: string;
  position: { x: number; y: number };
  cards: CardViewModel[];
}
