// Application orchestrator: owns the API client, the drag controller, and the
// per-conversation UI state; re-renders the canvas from server documents.
//
// The UI holds no memory semantics. Every gesture becomes exactly one API
// call, and the next paint comes from the workspace document the server
// returns, stamped with its revision.

import { ApiClient, ApiError } from "./api";
import { DragController, type DropCommit } from "./dragdrop";
import { buildInspector, buildPane, renderChildren, type PaneHandlers } from "./render";
import type { ContextPreview, WorkspaceDoc } from "./types";
import { conversationTitles, panesFrom, provenanceOf } from "./viewmodel";

const PANE_SPAWN_STEP = 60;

export class App {
  readonly root: HTMLElement;
  readonly client: ApiClient;
  readonly drag: DragController;

  doc: WorkspaceDoc | null = null;
  private readonly selected = new Map<string, Set<string>>();
  private readonly openInspectors = new Set<string>();
  private readonly busyConversations = new Set<string>();
  private editing = false;
  private offline = false;

  constructor(root: HTMLElement, client: ApiClient) {
    this.root = root;
    this.client = client;
    this.drag = new DragController(
      (commit) => this.commitDrop(commit),
      () => {},
    );
    this.drag.attach(root.ownerDocument);
  }

  /** Renders are skipped while a drag or inline edit is in progress. */
  get locked(): boolean {
    return this.drag.dragging || this.editing;
  }

  setWorkspace(doc: WorkspaceDoc): void {
    this.doc = doc;
    this.render();
  }

  async refresh(): Promise<void> {
    if (!this.doc) return;
    try {
      const doc = await this.client.getWorkspace(this.doc.id);
      this.setOffline(false);
      if (!this.locked) {
        this.setWorkspace(doc);
      }
    } catch (error) {
      if (error instanceof ApiError) throw error;
      this.setOffline(true); // transport failure, not an API verdict
    }
  }

  setOffline(offline: boolean): void {
    if (this.offline === offline) return;
    this.offline = offline;
    const banner = this.root.querySelector(".offline-banner");
    if (banner instanceof HTMLElement) banner.hidden = !offline;
  }

  // -- actions ---------------------------------------------------------------

  private async mutate(action: () => Promise<unknown>): Promise<void> {
    try {
      await action();
    } catch (error) {
      this.showError(error);
    }
    await this.refresh();
  }

  private showError(error: unknown): void {
    const toast = this.root.querySelector(".error-toast");
    if (toast instanceof HTMLElement) {
      toast.textContent =
        error instanceof ApiError ? `${error.code}: ${error.message}` : String(error);
      toast.hidden = false;
    }
  }

  private commitDrop(commit: DropCommit): void {
    if (!this.doc) return;
    const workspaceId = this.doc.id;
    if (commit.kind === "reorder") {
      void this.mutate(() =>
        this.client.reorderMemory(
          workspaceId,
          commit.srcConversationId,
          commit.memoryId,
          commit.index,
        ),
      );
    } else {
      void this.mutate(() =>
        this.client.shareMemory(
          workspaceId,
          commit.dstConversationId,
          commit.memoryId,
          commit.srcConversationId,
          commit.index,
        ),
      );
    }
  }

  async newConversation(): Promise<void> {
    if (!this.doc) return;
    const n = this.doc.conversations.length;
    await this.mutate(() =>
      this.client.createConversation(this.doc!.id, `conversation ${n + 1}`, {
        x: 40 + n * PANE_SPAWN_STEP,
        y: 40 + n * PANE_SPAWN_STEP,
      }),
    );
  }

  // -- rendering --------------------------------------------------------------

  render(): void {
    const doc = this.doc;
    if (!doc) return;

    this.root.replaceChildren();
    this.root.dataset.revision = String(doc.revision);
    this.root.dataset.workspaceId = doc.id;

    const banner = document.createElement("div");
    banner.className = "offline-banner";
    banner.textContent = "service unreachable — retrying…";
    banner.hidden = !this.offline;
    this.root.appendChild(banner);

    const toast = document.createElement("div");
    toast.className = "error-toast";
    toast.hidden = true;
    toast.addEventListener("click", () => (toast.hidden = true));
    this.root.appendChild(toast);

    const toolbar = document.createElement("div");
    toolbar.className = "toolbar";
    const newConv = document.createElement("button");
    newConv.className = "new-conversation";
    newConv.textContent = "new conversation";
    newConv.addEventListener("click", () => void this.newConversation());
    toolbar.appendChild(newConv);
    this.root.appendChild(toolbar);

    const canvas = document.createElement("div");
    canvas.className = "canvas";
    this.root.appendChild(canvas);

    const titles = conversationTitles(doc);
    for (const pane of panesFrom(doc)) {
      const conversationId = pane.conversationId;
      const selected = this.selectedFor(conversationId);
      const handlers = this.paneHandlers(conversationId, pane.cards.length);
      const paneEl = buildPane(
        pane,
        selected,
        (memoryId) => provenanceOf(doc, memoryId).map((id) => titles.get(id) ?? id),
        this.openInspectors.has(conversationId),
        this.busyConversations.has(conversationId),
        handlers,
      );
      canvas.appendChild(paneEl);
      if (this.openInspectors.has(conversationId)) {
        void this.loadInspector(conversationId, paneEl);
      }
    }
  }

  private selectedFor(conversationId: string): Set<string> {
    let set = this.selected.get(conversationId);
    if (!set) {
      set = new Set();
      this.selected.set(conversationId, set);
    }
    return set;
  }

  private paneHandlers(conversationId: string, cardCount: number): PaneHandlers {
    const workspaceId = () => this.doc!.id;
    return {
      onToggleVisibility: (memoryId) =>
        void this.mutate(() =>
          this.client.toggleVisibility(workspaceId(), conversationId, memoryId),
        ),
      onDelete: (memoryId) =>
        void this.mutate(() => this.client.deleteMemory(workspaceId(), conversationId, memoryId)),
      onEditStart: () => {
        this.editing = true;
      },
      onEdit: (memoryId, content) => {
        this.editing = false;
        void this.mutate(() => this.client.editMemory(workspaceId(), memoryId, content));
      },
      onEditCancel: () => {
        this.editing = false;
      },
      onSelectChange: (memoryId, isSelected) => {
        const set = this.selectedFor(conversationId);
        if (isSelected) set.add(memoryId);
        else set.delete(memoryId);
        this.render();
      },
      onExpandSummary: (memoryId, container) => {
        if (!container.hidden) {
          container.hidden = true;
          return;
        }
        void this.client
          .summaryChildren(workspaceId(), memoryId)
          .then((result) => renderChildren(container, result.children))
          .catch((error) => this.showError(error));
      },
      onDragStart: (memoryId, index) =>
        this.drag.begin({ conversationId, memoryId, index }),
      onDragHover: (index) =>
        this.drag.hover({ conversationId, index, cardCount }),
      onHoverEmpty: () =>
        this.drag.hover({ conversationId, index: cardCount, cardCount }),
      onSend: (text) => void this.send(conversationId, text),
      onAdd: (role, kind, content) =>
        void this.mutate(() =>
          this.client.addMemory(
            workspaceId(),
            conversationId,
            role as "user" | "assistant" | "system",
            kind as "message" | "note",
            content,
            cardCount,
          ),
        ),
      onSummarizeSelected: () => void this.summarizeSelected(conversationId),
      onToggleInspector: () => {
        if (this.openInspectors.has(conversationId)) {
          this.openInspectors.delete(conversationId);
        } else {
          this.openInspectors.add(conversationId);
        }
        this.render();
      },
    };
  }

  private async send(conversationId: string, text: string): Promise<void> {
    if (this.busyConversations.has(conversationId)) return;
    this.busyConversations.add(conversationId);
    this.render();
    try {
      await this.mutate(() => this.client.sendMessage(this.doc!.id, conversationId, text));
    } finally {
      this.busyConversations.delete(conversationId);
      this.render();
    }
  }

  private async summarizeSelected(conversationId: string): Promise<void> {
    const set = this.selectedFor(conversationId);
    if (set.size < 2 || this.busyConversations.has(conversationId)) return;
    const ids = [...set];
    this.busyConversations.add(conversationId);
    this.render();
    try {
      await this.mutate(() => this.client.summarize(this.doc!.id, conversationId, ids));
      set.clear();
    } finally {
      this.busyConversations.delete(conversationId);
      this.render();
    }
  }

  async loadInspector(conversationId: string, paneEl: HTMLElement): Promise<void> {
    const slot = paneEl.querySelector(".inspector-slot");
    if (!(slot instanceof HTMLElement)) return;
    let preview: ContextPreview;
    try {
      preview = await this.client.contextPreview(this.doc!.id, conversationId);
    } catch (error) {
      if (error instanceof ApiError && error.status === 404) {
        paneEl.remove(); // conversation vanished under us
        return;
      }
      this.showError(error);
      return;
    }
    slot.replaceChildren(buildInspector(preview));
    slot.hidden = false;
    const sendButton = paneEl.querySelector(".send-button");
    if (sendButton instanceof HTMLButtonElement && preview.verdict === "over_budget") {
      sendButton.disabled = true;
    }
  }
}
