// Pointer-based drag controller for memory cards.
//
// A drop inside the source pane means "reorder to the drop index"; a drop on
// another pane means "share at the drop index". One drop commits at most one
// API call, decided only at pointerup, so the two gestures can never both
// fire. Hovering a card targets that card's index; hovering a pane's empty
// body targets the end of that pane.

export interface DragSource {
  conversationId: string;
  memoryId: string;
  index: number;
}

export interface DropTarget {
  conversationId: string;
  index: number;
  cardCount: number;
}

export interface DropCommit {
  kind: "reorder" | "share";
  memoryId: string;
  srcConversationId: string;
  dstConversationId: string;
  index: number;
}

export type CommitHandler = (commit: DropCommit) => void;

export function resolveDrop(source: DragSource, target: DropTarget): DropCommit | null {
  if (target.conversationId === source.conversationId) {
    // Final index within the same list; dropping on the card's own slot is a no-op.
    const index = Math.min(target.index, target.cardCount - 1);
    if (index === source.index) {
      return null;
    }
    return {
      kind: "reorder",
      memoryId: source.memoryId,
      srcConversationId: source.conversationId,
      dstConversationId: source.conversationId,
      index,
    };
  }
  return {
    kind: "share",
    memoryId: source.memoryId,
    srcConversationId: source.conversationId,
    dstConversationId: target.conversationId,
    index: Math.min(target.index, target.cardCount),
  };
}

export class DragController {
  private source: DragSource | null = null;
  private target: DropTarget | null = null;
  private readonly onCommit: CommitHandler;
  private readonly onStateChange: (dragging: boolean) => void;

  constructor(onCommit: CommitHandler, onStateChange: (dragging: boolean) => void = () => {}) {
    this.onCommit = onCommit;
    this.onStateChange = onStateChange;
  }

  get dragging(): boolean {
    return this.source !== null;
  }

  begin(source: DragSource): void {
    this.source = source;
    this.target = { // until something else is hovered, the drop is a no-op
      conversationId: source.conversationId,
      index: source.index,
      cardCount: Number.MAX_SAFE_INTEGER,
    };
    this.onStateChange(true);
  }

  hover(target: DropTarget): void {
    if (this.source) {
      this.target = target;
    }
  }

  drop(): void {
    const { source, target } = this;
    this.source = null;
    this.target = null;
    this.onStateChange(false);
    if (!source || !target) {
      return;
    }
    const commit = resolveDrop(source, target);
    if (commit) {
      this.onCommit(commit);
    }
  }

  cancel(): void {
    this.source = null;
    this.target = null;
    this.onStateChange(false);
  }

  /** Wire global pointerup/Escape so drags always terminate. */
  attach(root: Document): void {
    root.addEventListener("pointerup", () => {
      if (this.dragging) {
        this.drop();
      }
    });
    root.addEventListener("keydown", (event) => {
      if ((event as KeyboardEvent).key === "Escape" && this.dragging) {
        this.cancel();
      }
    });
  }
}
