// Pure derivation of pane view models from the server's workspace document.
// Card order always equals server ref order; the shared badge is on exactly
// when two or more conversations reference the object.

import type { CardViewModel, PaneViewModel, WorkspaceDoc } from "./types";

export function referenceCounts(doc: WorkspaceDoc): Map<string, number> {
  const counts = new Map<string, number>();
  for (const conversation of doc.conversations) {
    for (const ref of conversation.refs) {
      counts.set(ref.memory_id, (counts.get(ref.memory_id) ?? 0) + 1);
    }
  }
  return counts;
}

export function panesFrom(doc: WorkspaceDoc): PaneViewModel[] {
  const pool = new Map(doc.pool.map((obj) => [obj.id, obj]));
  const counts = referenceCounts(doc);
  return doc.conversations.map((conversation) => {
    const cards: CardViewModel[] = conversation.refs.map((ref) => {
      const obj = pool.get(ref.memory_id);
      if (!obj) {
        throw new Error(`workspace document references missing object ${ref.memory_id}`);
      }
      return {
        id: obj.id,
        role: obj.role,
        kind: obj.kind,
        content: obj.content,
        visible: ref.visible,
        shared: (counts.get(obj.id) ?? 0) >= 2,
        expandable: obj.kind === "summary",
      };
    });
    return {
      conversationId: conversation.id,
      title: conversation.title,
      position: conversation.canvas_position,
      cards,
    };
  });
}

export function conversationTitles(doc: WorkspaceDoc): Map<string, string> {
  return new Map(doc.conversations.map((c) => [c.id, c.title]));
}

export function provenanceOf(doc: WorkspaceDoc, memoryId: string): string[] {
  return doc.conversations
    .filter((c) => c.refs.some((r) => r.memory_id === memoryId))
    .map((c) => c.id);
}
