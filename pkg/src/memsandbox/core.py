"""Workspace object model: the memory pool, conversations, and references.

A workspace holds one pool of memory objects plus any number of conversations.
Conversations never own objects; they hold ordered ``MemoryRef`` entries, so
placing an object into a second conversation aliases it (edits propagate) while
visibility and position stay per-reference. Deleting is un-referencing: an
object leaves the pool only when garbage collection finds it unreachable from
every conversation ref and every summary's children list.

All mutating operations are all-or-nothing: preconditions are validated before
any state is touched, and each successful mutation bumps ``revision`` by
exactly one. Callers are expected to serialize mutations per workspace (the
service layer holds a per-workspace lock); reads of a quiescent workspace are
safe from any thread.
"""

from __future__ import annotations

import time
import uuid
from dataclasses import dataclass, field

from .errors import (
    AlreadyReferenced,
    EmptyContent,
    IndexOutOfRange,
    InvalidConfig,
    NotReferenced,
    UnknownConversation,
    UnknownMemory,
)

ROLES = ("system", "user", "assistant")
KINDS = ("message", "note", "summary")

DEFAULT_MODEL_NAME = "gpt-3.5-turbo"
DEFAULT_TEMPERATURE = 0.7
DEFAULT_TOKEN_BUDGET = 4096
MIN_TOKEN_BUDGET = 16
MAX_ID_LENGTH = 64

_ID_ALPHABET = frozenset(
    "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789-_.~"
)


@dataclass
class MemoryObject:
    """One unit of conversational history living in the workspace pool."""

    id: str
    role: str
    kind: str
    content: str
    children: list[str] = field(default_factory=list)
    created_at: int = 0


@dataclass
class MemoryRef:
    """A conversation's handle on a pool object: position is the list index."""

    memory_id: str
    visible: bool = True


@dataclass
class AgentConfig:
    model_name: str = DEFAULT_MODEL_NAME
    temperature: float = DEFAULT_TEMPERATURE
    token_budget: int = DEFAULT_TOKEN_BUDGET


@dataclass
class Conversation:
    id: str
    title: str
    agent_config: AgentConfig
    refs: list[MemoryRef] = field(default_factory=list)
    canvas_position: tuple[float, float] = (0.0, 0.0)


@dataclass
class Workspace:
    id: str
    pool: dict[str, MemoryObject] = field(default_factory=dict)
    conversations: list[Conversation] = field(default_factory=list)
    revision: int = 0
    # Allocator state; persisted so ids are never reused across save/load.
    next_memory_seq: int = 1
    next_conversation_seq: int = 1


def _now_ms() -> int:
    return int(time.time() * 1000)


def create_workspace(workspace_id: str | None = None) -> Workspace:
    """Create an empty workspace: no conversations, no pool, revision 0."""
    return Workspace(id=workspace_id or "w" + uuid.uuid4().hex)


def validate_config(config: AgentConfig) -> None:
    """Raise InvalidConfig unless the agent configuration is usable."""
    if not isinstance(config.token_budget, int) or config.token_budget < MIN_TOKEN_BUDGET:
        raise InvalidConfig(
            f"token_budget must be an integer >= {MIN_TOKEN_BUDGET}, got {config.token_budget!r}"
        )
    if not 0 <= config.temperature <= 2:
        raise InvalidConfig(f"temperature must be in [0, 2], got {config.temperature!r}")
    if not config.model_name:
        raise InvalidConfig("model_name must be non-empty")


def get_conversation(ws: Workspace, conv_id: str) -> Conversation:
    for conv in ws.conversations:
        if conv.id == conv_id:
            return conv
    raise UnknownConversation(f"no conversation {conv_id!r} in workspace {ws.id!r}")


def get_memory(ws: Workspace, memory_id: str) -> MemoryObject:
    obj = ws.pool.get(memory_id)
    if obj is None:
        raise UnknownMemory(f"no memory object {memory_id!r} in workspace {ws.id!r}")
    return obj


def _ref_index(conv: Conversation, memory_id: str) -> int:
    for i, ref in enumerate(conv.refs):
        if ref.memory_id == memory_id:
            return i
    raise NotReferenced(f"conversation {conv.id!r} does not reference {memory_id!r}")


def _new_memory_id(ws: Workspace) -> str:
    # Skip occupied ids so a hand-edited document can't make us mint a duplicate.
    while f"m{ws.next_memory_seq}" in ws.pool:
        ws.next_memory_seq += 1
    memory_id = f"m{ws.next_memory_seq}"
    ws.next_memory_seq += 1
    return memory_id


def _new_conversation_id(ws: Workspace) -> str:
    taken = {conv.id for conv in ws.conversations}
    while f"c{ws.next_conversation_seq}" in taken:
        ws.next_conversation_seq += 1
    conv_id = f"c{ws.next_conversation_seq}"
    ws.next_conversation_seq += 1
    return conv_id


def reachable_ids(ws: Workspace) -> set[str]:
    """Ids reachable from any conversation ref, following summary children."""
    seen: set[str] = set()
    stack = [ref.memory_id for conv in ws.conversations for ref in conv.refs]
    while stack:
        memory_id = stack.pop()
        if memory_id in seen:
            continue
        seen.add(memory_id)
        obj = ws.pool.get(memory_id)
        if obj is not None:
            stack.extend(obj.children)
    return seen


def _collect_garbage(ws: Workspace) -> None:
    live = reachable_ids(ws)
    for memory_id in [mid for mid in ws.pool if mid not in live]:
        del ws.pool[memory_id]


def _commit(ws: Workspace) -> None:
    _collect_garbage(ws)
    ws.revision += 1


def create_conversation(
    ws: Workspace,
    title: str,
    config: AgentConfig | None = None,
    position: tuple[float, float] = (0.0, 0.0),
) -> Conversation:
    """Append a new empty conversation to the workspace canvas."""
    config = config if config is not None else AgentConfig()
    validate_config(config)
    canvas_position = (float(position[0]), float(position[1]))
    conv = Conversation(
        id=_new_conversation_id(ws),
        title=title,
        agent_config=config,
        canvas_position=canvas_position,
    )
    ws.conversations.append(conv)
    _commit(ws)
    return conv


def add_memory(
    ws: Workspace,
    conv_id: str,
    role: str,
    kind: str,
    content: str,
    index: int,
) -> MemoryObject:
    """Create a message or note object and reference it at ``index``.

    Summaries are never added directly; they only come out of summarization.
    """
    conv = get_conversation(ws, conv_id)
    if role not in ROLES:
        raise ValueError(f"role must be one of {ROLES}, got {role!r}")
    if kind not in ("message", "note"):
        raise ValueError(f"kind must be 'message' or 'note', got {kind!r}")
    if not content:
        raise EmptyContent("memory content must be non-empty")
    if not 0 <= index <= len(conv.refs):
        raise IndexOutOfRange(
            f"index {index} out of range for conversation of length {len(conv.refs)}"
        )
    obj = MemoryObject(
        id=_new_memory_id(ws),
        role=role,
        kind=kind,
        content=content,
        created_at=_now_ms(),
    )
    ws.pool[obj.id] = obj
    conv.refs.insert(index, MemoryRef(memory_id=obj.id, visible=True))
    _commit(ws)
    return obj


def edit_memory(ws: Workspace, memory_id: str, new_content: str) -> MemoryObject:
    """Replace an object's content; every referencing conversation sees it."""
    obj = get_memory(ws, memory_id)
    if not new_content:
        raise EmptyContent("memory content must be non-empty")
    obj.content = new_content
    _commit(ws)
    return obj


def delete_memory(ws: Workspace, conv_id: str, memory_id: str) -> None:
    """Remove this conversation's reference; garbage-collect if unreachable."""
    conv = get_conversation(ws, conv_id)
    index = _ref_index(conv, memory_id)
    del conv.refs[index]
    _commit(ws)


def toggle_visibility(ws: Workspace, conv_id: str, memory_id: str) -> MemoryRef:
    """Flip the visible flag on this conversation's reference only."""
    conv = get_conversation(ws, conv_id)
    ref = conv.refs[_ref_index(conv, memory_id)]
    ref.visible = not ref.visible
    _commit(ws)
    return ref


def reorder_memory(ws: Workspace, conv_id: str, memory_id: str, new_index: int) -> None:
    """Move a reference so its final position is ``new_index``."""
    conv = get_conversation(ws, conv_id)
    old_index = _ref_index(conv, memory_id)
    if not 0 <= new_index < len(conv.refs):
        raise IndexOutOfRange(
            f"new_index {new_index} out of range for conversation of length {len(conv.refs)}"
        )
    ref = conv.refs.pop(old_index)
    conv.refs.insert(new_index, ref)
    _commit(ws)


def share_memory(
    ws: Workspace,
    src_conv_id: str,
    memory_id: str,
    dst_conv_id: str,
    index: int,
) -> MemoryRef:
    """Reference an object from another conversation; the pool is untouched."""
    src = get_conversation(ws, src_conv_id)
    dst = get_conversation(ws, dst_conv_id)
    _ref_index(src, memory_id)
    if any(ref.memory_id == memory_id for ref in dst.refs):
        raise AlreadyReferenced(
            f"conversation {dst_conv_id!r} already references {memory_id!r}"
        )
    if not 0 <= index <= len(dst.refs):
        raise IndexOutOfRange(
            f"index {index} out of range for conversation of length {len(dst.refs)}"
        )
    ref = MemoryRef(memory_id=memory_id, visible=True)
    dst.refs.insert(index, ref)
    _commit(ws)
    return ref


def provenance(ws: Workspace, memory_id: str) -> list[str]:
    """Ids of conversations referencing the object, in workspace order.

    Summary children links do not count; only direct conversation refs do.
    """
    get_memory(ws, memory_id)
    return [
        conv.id
        for conv in ws.conversations
        if any(ref.memory_id == memory_id for ref in conv.refs)
    ]


def _valid_id(value: str) -> bool:
    return isinstance(value, str) and 1 <= len(value) <= MAX_ID_LENGTH and set(value) <= _ID_ALPHABET


def find_violation(ws: Workspace) -> str | None:
    """Scan the workspace for the first violated invariant, if any.

    Used by persistence to reject corrupt documents and by tests as the
    machine-checkable pool scan. Returns a human-readable description or None.
    """
    if not _valid_id(ws.id):
        return f"workspace id {ws.id!r} is not a valid identifier"
    if ws.revision < 0:
        return f"revision must be non-negative, got {ws.revision}"

    for memory_id, obj in ws.pool.items():
        if not _valid_id(memory_id):
            return f"memory id {memory_id!r} is not a valid identifier"
        if obj.id != memory_id:
            return f"pool key {memory_id!r} does not match object id {obj.id!r}"
        if obj.role not in ROLES:
            return f"memory {memory_id!r} has invalid role {obj.role!r}"
        if obj.kind not in KINDS:
            return f"memory {memory_id!r} has invalid kind {obj.kind!r}"
        if not obj.content:
            return f"memory {memory_id!r} has empty content"
        if obj.kind == "summary" and not obj.children:
            return f"summary {memory_id!r} has no children"
        if obj.kind != "summary" and obj.children:
            return f"non-summary {memory_id!r} has children"
        if len(set(obj.children)) != len(obj.children):
            return f"summary {memory_id!r} lists duplicate children"
        for child_id in obj.children:
            if child_id not in ws.pool:
                return f"summary {memory_id!r} references missing child {child_id!r}"

    cycle = _find_child_cycle(ws)
    if cycle is not None:
        return f"summary children form a cycle through {cycle!r}"

    seen_conv_ids: set[str] = set()
    for conv in ws.conversations:
        if not _valid_id(conv.id):
            return f"conversation id {conv.id!r} is not a valid identifier"
        if conv.id in seen_conv_ids:
            return f"duplicate conversation id {conv.id!r}"
        seen_conv_ids.add(conv.id)
        try:
            validate_config(conv.agent_config)
        except InvalidConfig as exc:
            return f"conversation {conv.id!r} has invalid config: {exc.message}"
        seen_refs: set[str] = set()
        for ref in conv.refs:
            if ref.memory_id not in ws.pool:
                return (
                    f"conversation {conv.id!r} references missing memory {ref.memory_id!r}"
                )
            if ref.memory_id in seen_refs:
                return f"conversation {conv.id!r} references {ref.memory_id!r} twice"
            seen_refs.add(ref.memory_id)

    orphans = set(ws.pool) - reachable_ids(ws)
    if orphans:
        return f"pool contains unreachable objects: {sorted(orphans)!r}"
    return None


def _find_child_cycle(ws: Workspace) -> str | None:
    # Iterative DFS with colors; returns an id on a cycle, if one exists.
    WHITE, GRAY, BLACK = 0, 1, 2
    color = {memory_id: WHITE for memory_id in ws.pool}
    for start in ws.pool:
        if color[start] != WHITE:
            continue
        stack: list[tuple[str, int]] = [(start, 0)]
        color[start] = GRAY
        while stack:
            node, child_pos = stack[-1]
            children = ws.pool[node].children
            if child_pos < len(children):
                stack[-1] = (node, child_pos + 1)
                child = children[child_pos]
                if child not in color:
                    continue  # dangling child; reported separately
                if color[child] == GRAY:
                    return child
                if color[child] == WHITE:
                    color[child] = GRAY
                    stack.append((child, 0))
            else:
                color[node] = BLACK
                stack.pop()
    return None
