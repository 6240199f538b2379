// DOM builders for the canvas, panes, cards, and the context inspector.
// Everything is rendered from server documents; event handlers delegate to
// the App, which calls the API and re-renders from the response state.

import type { CardViewModel, ContextPreview, MemoryDoc, PaneViewModel } from "./types";

export interface CardHandlers {
  onToggleVisibility(memoryId: string): void;
  onDelete(memoryId: string): void;
  onEditStart(): void;
  onEdit(memoryId: string, content: string): void;
  onEditCancel(): void;
  onSelectChange(memoryId: string, selected: boolean): void;
  onExpandSummary(memoryId: string, container: HTMLElement): void;
  onDragStart(memoryId: string, index: number): void;
  onDragHover(index: number): void;
}

export interface PaneHandlers extends CardHandlers {
  onSend(text: string): void;
  onAdd(role: string, kind: string, content: string): void;
  onSummarizeSelected(): void;
  onToggleInspector(): void;
  onHoverEmpty(): void;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function buildCard(
  card: CardViewModel,
  index: number,
  selected: boolean,
  provenanceTitles: string[],
  handlers: CardHandlers,
): HTMLElement {
  const root = el("article", "memory-card");
  root.dataset.memoryId = card.id;
  root.dataset.index = String(index);
  root.classList.add(`memory-card--${card.kind}`);
  if (!card.visible) root.classList.add("memory-card--hidden");

  root.addEventListener("pointerover", (event) => {
    event.stopPropagation();
    handlers.onDragHover(index);
  });

  const grip = el("div", "card-grip", "⠿");
  grip.title = "drag to reorder, or drop on another conversation to share";
  grip.addEventListener("pointerdown", (event) => {
    event.preventDefault();
    handlers.onDragStart(card.id, index);
  });
  root.appendChild(grip);

  const header = el("header", "card-header");
  header.appendChild(el("span", `role-chip role-chip--${card.role}`, card.role));
  header.appendChild(el("span", "kind-chip", card.kind));
  if (card.shared) {
    const badge = el("span", "shared-badge", "shared");
    badge.title = `referenced by: ${provenanceTitles.join(", ")}`;
    header.appendChild(badge);
  }
  root.appendChild(header);

  const content = el("div", "card-content", card.content);
  if (card.expandable) {
    content.classList.add("card-content--summary");
    const children = el("div", "card-children");
    children.hidden = true;
    content.addEventListener("click", () => {
      handlers.onExpandSummary(card.id, children);
    });
    root.appendChild(content);
    root.appendChild(children);
  } else {
    root.appendChild(content);
  }

  content.addEventListener("dblclick", () => {
    startInlineEdit(root, content, card, handlers);
  });

  const footer = el("footer", "card-footer");
  const select = el("input", "select-box");
  select.type = "checkbox";
  select.checked = selected;
  select.addEventListener("change", () => handlers.onSelectChange(card.id, select.checked));
  footer.appendChild(select);

  const eye = el("button", "eye-button", card.visible ? "hide" : "show");
  eye.type = "button";
  eye.addEventListener("click", () => handlers.onToggleVisibility(card.id));
  footer.appendChild(eye);

  const remove = el("button", "delete-button", "delete");
  remove.type = "button";
  remove.addEventListener("click", () => handlers.onDelete(card.id));
  footer.appendChild(remove);

  root.appendChild(footer);
  return root;
}

function startInlineEdit(
  root: HTMLElement,
  content: HTMLElement,
  card: CardViewModel,
  handlers: CardHandlers,
): void {
  if (root.querySelector(".card-editor")) return;
  handlers.onEditStart();
  const editor = el("textarea", "card-editor");
  editor.value = card.content;
  content.replaceWith(editor);
  editor.focus();
  let done = false;
  const commit = () => {
    if (done) return;
    done = true;
    if (editor.value && editor.value !== card.content) {
      handlers.onEdit(card.id, editor.value);
    } else {
      editor.replaceWith(content);
      handlers.onEditCancel();
    }
  };
  editor.addEventListener("keydown", (event) => {
    if (event.key === "Enter" && !event.shiftKey) {
      event.preventDefault();
      commit();
    } else if (event.key === "Escape") {
      done = true;
      editor.replaceWith(content);
      handlers.onEditCancel();
    }
  });
  editor.addEventListener("blur", commit);
}

export function renderChildren(container: HTMLElement, children: MemoryDoc[]): void {
  container.replaceChildren();
  for (const child of children) {
    const item = el("div", "child-item");
    item.dataset.memoryId = child.id;
    item.appendChild(el("span", `role-chip role-chip--${child.role}`, child.role));
    item.appendChild(el("span", "child-content", child.content));
    container.appendChild(item);
  }
  container.hidden = false;
}

export function buildInspector(preview: ContextPreview): HTMLElement {
  const panel = el("div", "inspector");

  const meter = el("div", "token-meter");
  meter.dataset.estimate = String(preview.token_estimate);
  meter.dataset.budget = String(preview.budget);
  const used = el("span", "token-meter-used", `${preview.token_estimate} / ${preview.budget}`);
  meter.appendChild(used);
  const bar = el("div", "token-meter-bar");
  const fill = el("div", "token-meter-fill");
  fill.style.width = `${Math.min(100, (preview.token_estimate / preview.budget) * 100)}%`;
  bar.appendChild(fill);
  meter.appendChild(bar);
  panel.appendChild(meter);

  if (preview.verdict === "over_budget") {
    panel.appendChild(
      el(
        "div",
        "over-budget-warning",
        `over budget by ${preview.excess} tokens — hide or summarize before sending`,
      ),
    );
  }

  const list = el("div", "inspector-messages");
  preview.messages.forEach((message, i) => {
    const row = el("div", "ctx-message");
    row.dataset.memoryId = preview.included_ids[i];
    row.appendChild(el("span", `role-chip role-chip--${message.role}`, message.role));
    row.appendChild(el("span", "ctx-content", message.content));
    list.appendChild(row);
  });
  panel.appendChild(list);
  return panel;
}

export function buildPane(
  pane: PaneViewModel,
  selectedIds: Set<string>,
  provenanceTitles: (memoryId: string) => string[],
  inspectorOpen: boolean,
  busy: boolean,
  handlers: PaneHandlers,
): HTMLElement {
  const root = el("section", "pane");
  root.dataset.conversationId = pane.conversationId;
  root.style.left = `${pane.position.x}px`;
  root.style.top = `${pane.position.y}px`;

  const header = el("header", "pane-header");
  header.appendChild(el("h2", "pane-title", pane.title || "untitled"));
  const inspectorToggle = el(
    "button",
    "inspector-toggle",
    inspectorOpen ? "hide context" : "show context",
  );
  inspectorToggle.type = "button";
  inspectorToggle.addEventListener("click", () => handlers.onToggleInspector());
  header.appendChild(inspectorToggle);
  root.appendChild(header);

  const cardList = el("div", "pane-cards");
  cardList.addEventListener("pointerover", () => handlers.onHoverEmpty());
  pane.cards.forEach((card, index) => {
    cardList.appendChild(
      buildCard(card, index, selectedIds.has(card.id), provenanceTitles(card.id), handlers),
    );
  });
  root.appendChild(cardList);

  const inspectorSlot = el("div", "inspector-slot");
  inspectorSlot.hidden = !inspectorOpen;
  root.appendChild(inspectorSlot);

  const summarizeBar = el("div", "summarize-bar");
  const summarizeButton = el(
    "button",
    "summarize-button",
    `summarize selected (${selectedIds.size})`,
  );
  summarizeButton.type = "button";
  summarizeButton.disabled = selectedIds.size < 2 || busy;
  summarizeButton.addEventListener("click", () => handlers.onSummarizeSelected());
  summarizeBar.appendChild(summarizeButton);
  root.appendChild(summarizeBar);

  const addForm = el("form", "add-form");
  const roleSelect = el("select", "add-role");
  for (const role of ["user", "assistant", "system"]) {
    const option = el("option", undefined, role);
    option.value = role;
    roleSelect.appendChild(option);
  }
  const kindSelect = el("select", "add-kind");
  for (const kind of ["note", "message"]) {
    const option = el("option", undefined, kind);
    option.value = kind;
    kindSelect.appendChild(option);
  }
  const addInput = el("input", "add-input");
  addInput.placeholder = "add memory…";
  const addButton = el("button", "add-button", "add");
  addButton.type = "submit";
  addForm.append(roleSelect, kindSelect, addInput, addButton);
  addForm.addEventListener("submit", (event) => {
    event.preventDefault();
    if (addInput.value) {
      handlers.onAdd(roleSelect.value, kindSelect.value, addInput.value);
      addInput.value = "";
    }
  });
  root.appendChild(addForm);

  const sendForm = el("form", "send-form");
  const sendInput = el("input", "send-input");
  sendInput.placeholder = "message the agent…";
  const sendButton = el("button", "send-button", busy ? "sending…" : "send");
  sendButton.type = "submit";
  sendButton.disabled = busy;
  sendForm.append(sendInput, sendButton);
  sendForm.addEventListener("submit", (event) => {
    event.preventDefault();
    if (sendInput.value && !sendButton.disabled) {
      handlers.onSend(sendInput.value);
      sendInput.value = "";
    }
  });
  root.appendChild(sendForm);

  return root;
}
