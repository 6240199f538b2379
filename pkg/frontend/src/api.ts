// Thin typed client for the memsandbox HTTP API. No memory semantics live
// here: every mutation is one request, and callers re-render from whatever
// the server says afterwards.

import type { ApiErrorBody, ContextPreview, MemoryDoc, Role, WorkspaceDoc } from "./types";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  readonly code: string;
  readonly status: number;
  readonly excess?: number;

  constructor(body: ApiErrorBody) {
    super(body.message);
    this.code = body.code;
    this.status = body.http_status;
    this.excess = body.excess;
  }
}

export class ApiClient {
  private readonly fetchFn: FetchLike;
  readonly baseUrl: string;

  constructor(baseUrl = "", fetchFn?: FetchLike) {
    this.baseUrl = baseUrl.replace(/\/$/, "");
    this.fetchFn = fetchFn ?? ((input, init) => fetch(input, init));
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method, headers: {} };
    if (body !== undefined) {
      init.headers = { "content-type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const response = await this.fetchFn(this.baseUrl + path, init);
    const payload = await response.json();
    if (!response.ok) {
      throw new ApiError(payload as ApiErrorBody);
    }
    return payload as T;
  }

  createWorkspace(): Promise<WorkspaceDoc> {
    return this.request("POST", "/workspaces");
  }

  getWorkspace(workspaceId: string): Promise<WorkspaceDoc> {
    return this.request("GET", `/workspaces/${workspaceId}`);
  }

  createConversation(
    workspaceId: string,
    title: string,
    position: { x: number; y: number },
  ): Promise<{ conversation: { id: string }; revision: number }> {
    return this.request("POST", `/workspaces/${workspaceId}/conversations`, {
      title,
      canvas_position: position,
    });
  }

  addMemory(
    workspaceId: string,
    conversationId: string,
    role: Role,
    kind: "message" | "note",
    content: string,
    index: number,
  ): Promise<{ memory: MemoryDoc; revision: number }> {
    return this.request(
      "POST",
      `/workspaces/${workspaceId}/conversations/${conversationId}/memories`,
      { role, kind, content, index },
    );
  }

  editMemory(
    workspaceId: string,
    memoryId: string,
    content: string,
  ): Promise<{ memory: MemoryDoc; revision: number }> {
    return this.request("PATCH", `/workspaces/${workspaceId}/memories/${memoryId}`, { content });
  }

  deleteMemory(
    workspaceId: string,
    conversationId: string,
    memoryId: string,
  ): Promise<{ revision: number }> {
    return this.request(
      "DELETE",
      `/workspaces/${workspaceId}/conversations/${conversationId}/memories/${memoryId}`,
    );
  }

  toggleVisibility(
    workspaceId: string,
    conversationId: string,
    memoryId: string,
  ): Promise<{ ref: { memory_id: string; visible: boolean }; revision: number }> {
    return this.request(
      "POST",
      `/workspaces/${workspaceId}/conversations/${conversationId}/memories/${memoryId}/toggle-visibility`,
    );
  }

  reorderMemory(
    workspaceId: string,
    conversationId: string,
    memoryId: string,
    newIndex: number,
  ): Promise<{ revision: number }> {
    return this.request(
      "POST",
      `/workspaces/${workspaceId}/conversations/${conversationId}/memories/${memoryId}/reorder`,
      { new_index: newIndex },
    );
  }

  shareMemory(
    workspaceId: string,
    dstConversationId: string,
    memoryId: string,
    srcConversationId: string,
    index: number,
  ): Promise<{ ref: { memory_id: string; visible: boolean }; revision: number }> {
    return this.request(
      "POST",
      `/workspaces/${workspaceId}/conversations/${dstConversationId}/share`,
      { memory_id: memoryId, src_conversation_id: srcConversationId, index },
    );
  }

  summarize(
    workspaceId: string,
    conversationId: string,
    memoryIds: string[],
  ): Promise<{ memory: MemoryDoc; revision: number }> {
    return this.request(
      "POST",
      `/workspaces/${workspaceId}/conversations/${conversationId}/summarize`,
      { memory_ids: memoryIds },
    );
  }

  sendMessage(
    workspaceId: string,
    conversationId: string,
    content: string,
  ): Promise<{ user: MemoryDoc; assistant: MemoryDoc; revision: number }> {
    return this.request(
      "POST",
      `/workspaces/${workspaceId}/conversations/${conversationId}/messages`,
      { content },
    );
  }

  contextPreview(workspaceId: string, conversationId: string): Promise<ContextPreview> {
    return this.request(
      "GET",
      `/workspaces/${workspaceId}/conversations/${conversationId}/context`,
    );
  }

  summaryChildren(workspaceId: string, memoryId: string): Promise<{ children: MemoryDoc[] }> {
    return this.request("GET", `/workspaces/${workspaceId}/memories/${memoryId}/children`);
  }

  provenance(workspaceId: string, memoryId: string): Promise<{ conversation_ids: string[] }> {
    return this.request("GET", `/workspaces/${workspaceId}/memories/${memoryId}/provenance`);
  }
}
