"""Collapse selected memory objects into one LLM-written summary object.

The summary replaces the selected references in the conversation (at the
position of the first selected one) but the originals stay in the pool as the
summary's children, so the pre-summary conversation is always recoverable.
The prompt template is fixed and versioned so outputs are reproducible
against the mock backend.
"""

from __future__ import annotations

from . import core
from .core import MemoryObject, Workspace
from .errors import NotASummary, NotReferenced, ProviderError, StaleRevision, TooFewSelected
from .gateway import ChatRequest, chat

PROMPT_VERSION = 1
SUMMARY_INSTRUCTION = (
    "Summarize the following conversation excerpt in at most 150 words. "
    "Preserve named entities, decisions, and commitments."
)

RefsSnapshot = tuple[tuple[str, bool], ...]


def refs_snapshot(ws: Workspace, conv_id: str) -> RefsSnapshot:
    """Value snapshot of a conversation's refs, for stale-commit detection."""
    conv = core.get_conversation(ws, conv_id)
    return tuple((ref.memory_id, ref.visible) for ref in conv.refs)


def build_summary_request(
    ws: Workspace,
    conv_id: str,
    memory_ids: list[str],
) -> tuple[ChatRequest, list[str], RefsSnapshot]:
    """Validate a selection and build the versioned summarization prompt.

    The selection is normalized to conversation order (duplicates dropped), so
    the serialized excerpt always reads in the order the agent saw it. Returns
    the request, the normalized ids, and a refs snapshot to commit against.
    """
    conv = core.get_conversation(ws, conv_id)
    referenced = [ref.memory_id for ref in conv.refs]
    selected = set(memory_ids)
    for memory_id in selected:
        if memory_id not in referenced:
            raise NotReferenced(
                f"conversation {conv_id!r} does not reference {memory_id!r}"
            )
    ordered_ids = [memory_id for memory_id in referenced if memory_id in selected]
    if len(ordered_ids) < 2:
        raise TooFewSelected(
            f"summarization needs at least 2 distinct objects, got {len(ordered_ids)}"
        )
    excerpt = "\n".join(
        f"{ws.pool[memory_id].role}: {ws.pool[memory_id].content}"
        for memory_id in ordered_ids
    )
    request = ChatRequest(
        model_name=conv.agent_config.model_name,
        messages=(("system", SUMMARY_INSTRUCTION), ("user", excerpt)),
        temperature=conv.agent_config.temperature,
    )
    return request, ordered_ids, refs_snapshot(ws, conv_id)


def apply_summary(
    ws: Workspace,
    conv_id: str,
    ordered_ids: list[str],
    summary_text: str,
    snapshot: RefsSnapshot,
) -> MemoryObject:
    """Commit a summary: swap the selected refs for one visible summary ref.

    Rejected with StaleRevision if the conversation's refs changed since the
    snapshot was taken (the caller re-validates and retries). Other
    conversations referencing the summarized objects are untouched.
    """
    conv = core.get_conversation(ws, conv_id)
    if refs_snapshot(ws, conv_id) != snapshot:
        raise StaleRevision(
            f"conversation {conv_id!r} changed while the summary was generated"
        )
    if not summary_text:
        raise ProviderError("backend produced an empty summary")
    selected = set(ordered_ids)
    insert_at = next(
        i for i, ref in enumerate(conv.refs) if ref.memory_id in selected
    )
    summary = MemoryObject(
        id=core._new_memory_id(ws),
        role="system",
        kind="summary",
        content=summary_text,
        children=list(ordered_ids),
        created_at=core._now_ms(),
    )
    ws.pool[summary.id] = summary
    conv.refs = [ref for ref in conv.refs if ref.memory_id not in selected]
    conv.refs.insert(insert_at, core.MemoryRef(memory_id=summary.id, visible=True))
    core._commit(ws)
    return summary


def summarize(
    ws: Workspace,
    conv_id: str,
    memory_ids: list[str],
    backend,
) -> MemoryObject:
    """Summarize selected objects via the backend; all-or-nothing on failure."""
    request, ordered_ids, snapshot = build_summary_request(ws, conv_id, memory_ids)
    response = chat(request, backend)
    return apply_summary(ws, conv_id, ordered_ids, response.content, snapshot)


def expand_summary(ws: Workspace, summary_id: str) -> list[MemoryObject]:
    """Return a summary's children in stored order; read-only."""
    obj = core.get_memory(ws, summary_id)
    if obj.kind != "summary":
        raise NotASummary(f"memory {summary_id!r} has kind {obj.kind!r}")
    return [ws.pool[child_id] for child_id in obj.children]
