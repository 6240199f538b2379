"""Workspace serialization: one human-inspectable JSON document per workspace.

Saves are atomic (temp file + rename) and byte-deterministic for a given
workspace value. Loads re-validate every workspace invariant and reject the
whole document on the first violation — a partially trusted memory store is
worse than none.
"""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path

from . import core
from .core import AgentConfig, Conversation, MemoryObject, MemoryRef, Workspace
from .errors import CorruptDocument, SchemaMismatch

SCHEMA_VERSION = 1

_WORKSPACE_FIELDS = {
    "schema_version",
    "id",
    "revision",
    "next_memory_seq",
    "next_conversation_seq",
    "pool",
    "conversations",
}
_MEMORY_FIELDS = {"id", "role", "kind", "content", "children", "created_at"}
_CONVERSATION_FIELDS = {"id", "title", "agent_config", "canvas_position", "refs"}
_CONFIG_FIELDS = {"model_name", "temperature", "token_budget"}
_REF_FIELDS = {"memory_id", "visible"}
_POSITION_FIELDS = {"x", "y"}


def workspace_to_document(ws: Workspace) -> dict:
    """Plain-data document tree; pool is sorted by id for determinism."""
    return {
        "schema_version": SCHEMA_VERSION,
        "id": ws.id,
        "revision": ws.revision,
        "next_memory_seq": ws.next_memory_seq,
        "next_conversation_seq": ws.next_conversation_seq,
        "pool": [
            {
                "id": obj.id,
                "role": obj.role,
                "kind": obj.kind,
                "content": obj.content,
                "children": list(obj.children),
                "created_at": obj.created_at,
            }
            for obj in sorted(ws.pool.values(), key=lambda obj: obj.id)
        ],
        "conversations": [
            {
                "id": conv.id,
                "title": conv.title,
                "agent_config": {
                    "model_name": conv.agent_config.model_name,
                    "temperature": conv.agent_config.temperature,
                    "token_budget": conv.agent_config.token_budget,
                },
                "canvas_position": {
                    "x": conv.canvas_position[0],
                    "y": conv.canvas_position[1],
                },
                "refs": [
                    {"memory_id": ref.memory_id, "visible": ref.visible}
                    for ref in conv.refs
                ],
            }
            for conv in ws.conversations
        ],
    }


def dumps(ws: Workspace) -> str:
    return json.dumps(workspace_to_document(ws), indent=2, sort_keys=True) + "\n"


def save(ws: Workspace, destination: str | Path) -> None:
    """Write the workspace document atomically (temp file, then rename)."""
    destination = Path(destination)
    destination.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_path = tempfile.mkstemp(
        dir=destination.parent, prefix=destination.name + ".", suffix=".tmp"
    )
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            handle.write(dumps(ws))
        os.replace(tmp_path, destination)
    except BaseException:
        try:
            os.unlink(tmp_path)
        except OSError:
            pass
        raise


def _reject_unknown_fields(obj: dict, allowed: set[str], where: str) -> None:
    unknown = set(obj) - allowed
    if unknown:
        raise SchemaMismatch(
            f"{where} carries fields unknown to schema version {SCHEMA_VERSION}: "
            f"{sorted(unknown)!r}"
        )


def _expect(condition: bool, message: str) -> None:
    if not condition:
        raise CorruptDocument(message)


def document_to_workspace(doc) -> Workspace:
    """Rebuild a workspace from a document tree, validating every invariant."""
    _expect(isinstance(doc, dict), "document root must be an object")
    if "schema_version" not in doc:
        raise SchemaMismatch("document lacks a schema_version field")
    version = doc["schema_version"]
    if version != SCHEMA_VERSION:
        raise SchemaMismatch(
            f"document schema_version {version!r} is not the supported {SCHEMA_VERSION}"
        )
    _reject_unknown_fields(doc, _WORKSPACE_FIELDS, "workspace document")
    for fieldname in _WORKSPACE_FIELDS:
        _expect(fieldname in doc, f"workspace document lacks field {fieldname!r}")
    _expect(isinstance(doc["id"], str), "workspace id must be a string")
    _expect(
        isinstance(doc["revision"], int) and not isinstance(doc["revision"], bool),
        "revision must be an integer",
    )
    for seq_field in ("next_memory_seq", "next_conversation_seq"):
        _expect(
            isinstance(doc[seq_field], int) and not isinstance(doc[seq_field], bool),
            f"{seq_field} must be an integer",
        )
    _expect(isinstance(doc["pool"], list), "pool must be an array")
    _expect(isinstance(doc["conversations"], list), "conversations must be an array")

    pool: dict[str, MemoryObject] = {}
    for entry in doc["pool"]:
        _expect(isinstance(entry, dict), "pool entries must be objects")
        _reject_unknown_fields(entry, _MEMORY_FIELDS, "memory object")
        for fieldname in _MEMORY_FIELDS:
            _expect(fieldname in entry, f"memory object lacks field {fieldname!r}")
        for fieldname in ("id", "role", "kind", "content"):
            _expect(
                isinstance(entry[fieldname], str),
                f"memory field {fieldname!r} must be a string",
            )
        _expect(
            isinstance(entry["created_at"], int) and not isinstance(entry["created_at"], bool),
            "created_at must be an integer",
        )
        _expect(isinstance(entry["children"], list), "children must be an array")
        _expect(
            all(isinstance(child, str) for child in entry["children"]),
            "children entries must be strings",
        )
        _expect(entry["id"] not in pool, f"duplicate memory id {entry['id']!r}")
        pool[entry["id"]] = MemoryObject(
            id=entry["id"],
            role=entry["role"],
            kind=entry["kind"],
            content=entry["content"],
            children=list(entry["children"]),
            created_at=entry["created_at"],
        )

    conversations: list[Conversation] = []
    for entry in doc["conversations"]:
        _expect(isinstance(entry, dict), "conversation entries must be objects")
        _reject_unknown_fields(entry, _CONVERSATION_FIELDS, "conversation")
        for fieldname in _CONVERSATION_FIELDS:
            _expect(fieldname in entry, f"conversation lacks field {fieldname!r}")
        _expect(isinstance(entry["id"], str), "conversation id must be a string")
        _expect(isinstance(entry["title"], str), "conversation title must be a string")
        config = entry["agent_config"]
        _expect(isinstance(config, dict), "agent_config must be an object")
        _reject_unknown_fields(config, _CONFIG_FIELDS, "agent_config")
        for fieldname in _CONFIG_FIELDS:
            _expect(fieldname in config, f"agent_config lacks field {fieldname!r}")
        _expect(isinstance(config["model_name"], str), "model_name must be a string")
        _expect(
            isinstance(config["temperature"], (int, float))
            and not isinstance(config["temperature"], bool),
            "temperature must be a number",
        )
        _expect(
            isinstance(config["token_budget"], int)
            and not isinstance(config["token_budget"], bool),
            "token_budget must be an integer",
        )
        position = entry["canvas_position"]
        _expect(isinstance(position, dict), "canvas_position must be an object")
        _reject_unknown_fields(position, _POSITION_FIELDS, "canvas_position")
        for axis in ("x", "y"):
            _expect(
                axis in position
                and isinstance(position[axis], (int, float))
                and not isinstance(position[axis], bool),
                f"canvas_position.{axis} must be a number",
            )
        refs: list[MemoryRef] = []
        _expect(isinstance(entry["refs"], list), "refs must be an array")
        for ref_entry in entry["refs"]:
            _expect(isinstance(ref_entry, dict), "ref entries must be objects")
            _reject_unknown_fields(ref_entry, _REF_FIELDS, "memory ref")
            for fieldname in _REF_FIELDS:
                _expect(fieldname in ref_entry, f"memory ref lacks field {fieldname!r}")
            _expect(isinstance(ref_entry["memory_id"], str), "memory_id must be a string")
            _expect(isinstance(ref_entry["visible"], bool), "visible must be a boolean")
            refs.append(MemoryRef(memory_id=ref_entry["memory_id"], visible=ref_entry["visible"]))
        conversations.append(
            Conversation(
                id=entry["id"],
                title=entry["title"],
                agent_config=AgentConfig(
                    model_name=config["model_name"],
                    temperature=float(config["temperature"]),
                    token_budget=config["token_budget"],
                ),
                refs=refs,
                canvas_position=(float(position["x"]), float(position["y"])),
            )
        )

    ws = Workspace(
        id=doc["id"],
        pool=pool,
        conversations=conversations,
        revision=doc["revision"],
        next_memory_seq=doc["next_memory_seq"],
        next_conversation_seq=doc["next_conversation_seq"],
    )
    violation = core.find_violation(ws)
    if violation is not None:
        raise CorruptDocument(violation)
    return ws


def load(source: str | Path) -> Workspace:
    """Read and validate a workspace document; rejects rather than repairs."""
    text = Path(source).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except ValueError as exc:
        raise CorruptDocument(f"document is not valid JSON: {exc}") from exc
    return document_to_workspace(doc)


def workspace_path(store_dir: str | Path, workspace_id: str) -> Path:
    return Path(store_dir) / f"{workspace_id}.json"
