"""HTTP surface exposing every engine operation.

The API layer adds no semantics: each endpoint validates its JSON body, takes
the per-workspace lock, runs exactly one engine operation, persists the
workspace (write-through), and echoes the new revision. send_message and
summarize release the lock while waiting on the provider, holding only a
per-conversation busy flag so other conversations stay mutable.
"""

from __future__ import annotations

import logging
import threading
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from . import assembly, core, gateway, storage, summarizer
from .core import AgentConfig, Conversation, MemoryObject, MemoryRef, Workspace
from .errors import (
    ConversationBusy,
    LlmFailure,
    MemorySandboxError,
    UnknownWorkspace,
)

logger = logging.getLogger(__name__)

DEFAULT_PORT = 8642
DEFAULT_STORE_DIR = "./memsandbox-data"

# Total engine-error -> HTTP status mapping; anything missing here is a bug.
STATUS_BY_CODE = {
    "UnknownWorkspace": 404,
    "UnknownConversation": 404,
    "UnknownMemory": 404,
    "NotReferenced": 404,
    "IndexOutOfRange": 400,
    "EmptyContent": 400,
    "InvalidConfig": 400,
    "TooFewSelected": 400,
    "AlreadyReferenced": 400,
    "NotASummary": 400,
    "ConversationBusy": 409,
    "StaleRevision": 409,
    "OverBudget": 422,
    "AuthError": 502,
    "RateLimited": 429,
    "ProviderError": 502,
    "Timeout": 502,
    "LlmFailure": 502,
    "SchemaMismatch": 500,
    "CorruptDocument": 500,
    "Internal": 500,
}


@dataclass
class ServiceSettings:
    store_dir: Path = Path(DEFAULT_STORE_DIR)
    provider_url: str = gateway.DEFAULT_PROVIDER_URL
    model_name: str = core.DEFAULT_MODEL_NAME
    token_budget: int = core.DEFAULT_TOKEN_BUDGET
    mock_llm: bool = False
    llm_timeout_seconds: float = gateway.DEFAULT_TIMEOUT_SECONDS


@dataclass
class WorkspaceState:
    workspace: Workspace
    lock: threading.RLock = field(default_factory=threading.RLock)
    busy_conversations: set[str] = field(default_factory=set)


class WorkspaceRegistry:
    """Owns loaded workspaces, their locks, and write-through persistence."""

    def __init__(self, settings: ServiceSettings, backend):
        self.settings = settings
        self.backend = backend
        self._states: dict[str, WorkspaceState] = {}
        self._registry_lock = threading.Lock()

    def _state(self, workspace_id: str) -> WorkspaceState:
        with self._registry_lock:
            state = self._states.get(workspace_id)
            if state is not None:
                return state
            path = storage.workspace_path(self.settings.store_dir, workspace_id)
            if not path.is_file():
                raise UnknownWorkspace(f"no workspace {workspace_id!r}")
            state = WorkspaceState(workspace=storage.load(path))
            self._states[workspace_id] = state
            return state

    def create_workspace(self) -> Workspace:
        ws = core.create_workspace()
        state = WorkspaceState(workspace=ws)
        with self._registry_lock:
            self._states[ws.id] = state
        self.persist(ws)
        return ws

    def persist(self, ws: Workspace) -> None:
        storage.save(ws, storage.workspace_path(self.settings.store_dir, ws.id))

    @contextmanager
    def locked(self, workspace_id: str):
        state = self._state(workspace_id)
        with state.lock:
            yield state

    @contextmanager
    def mutating(self, workspace_id: str):
        """Lock, yield the workspace, persist on success."""
        with self.locked(workspace_id) as state:
            yield state.workspace
            self.persist(state.workspace)

    def mark_busy(self, state: WorkspaceState, conv_id: str) -> None:
        # Caller holds the workspace lock.
        if conv_id in state.busy_conversations:
            raise ConversationBusy(f"conversation {conv_id!r} has a call in flight")
        state.busy_conversations.add(conv_id)

    def clear_busy(self, state: WorkspaceState, conv_id: str) -> None:
        with state.lock:
            state.busy_conversations.discard(conv_id)


class AgentConfigBody(BaseModel):
    model_name: str | None = None
    temperature: float | None = None
    token_budget: int | None = None


class PositionBody(BaseModel):
    x: float = 0.0
    y: float = 0.0


class CreateConversationBody(BaseModel):
    title: str = ""
    agent_config: AgentConfigBody | None = None
    canvas_position: PositionBody | None = None


class AddMemoryBody(BaseModel):
    role: Literal["system", "user", "assistant"]
    kind: Literal["message", "note"]
    content: str
    index: int


class EditMemoryBody(BaseModel):
    content: str


class SendMessageBody(BaseModel):
    content: str


class ReorderBody(BaseModel):
    new_index: int


class SummarizeBody(BaseModel):
    memory_ids: list[str]


class ShareBody(BaseModel):
    memory_id: str
    src_conversation_id: str
    index: int


def memory_json(obj: MemoryObject) -> dict:
    return {
        "id": obj.id,
        "role": obj.role,
        "kind": obj.kind,
        "content": obj.content,
        "children": list(obj.children),
        "created_at": obj.created_at,
    }


def ref_json(ref: MemoryRef) -> dict:
    return {"memory_id": ref.memory_id, "visible": ref.visible}


def conversation_json(conv: Conversation) -> dict:
    return {
        "id": conv.id,
        "title": conv.title,
        "agent_config": {
            "model_name": conv.agent_config.model_name,
            "temperature": conv.agent_config.temperature,
            "token_budget": conv.agent_config.token_budget,
        },
        "canvas_position": {"x": conv.canvas_position[0], "y": conv.canvas_position[1]},
        "refs": [ref_json(ref) for ref in conv.refs],
    }


def context_json(ws: Workspace, conv_id: str) -> dict:
    ctx = assembly.assemble(ws, conv_id)
    budget = core.get_conversation(ws, conv_id).agent_config.token_budget
    verdict = assembly.check_budget(ctx, budget)
    return {
        "messages": [{"role": role, "content": content} for role, content in ctx.messages],
        "included_ids": list(ctx.included_ids),
        "token_estimate": ctx.token_estimate,
        "budget": budget,
        "verdict": "ok" if verdict.ok else "over_budget",
        "excess": verdict.excess,
    }


def build_backend(settings: ServiceSettings):
    if settings.mock_llm:
        return gateway.MockBackend()
    return gateway.HttpBackend(
        base_url=settings.provider_url,
        timeout=settings.llm_timeout_seconds,
    )


def create_app(settings: ServiceSettings | None = None, backend=None) -> FastAPI:
    settings = settings or ServiceSettings()
    backend = backend if backend is not None else build_backend(settings)
    registry = WorkspaceRegistry(settings, backend)

    app = FastAPI(title="memsandbox", docs_url=None, redoc_url=None)
    app.state.registry = registry
    app.state.settings = settings

    @app.exception_handler(MemorySandboxError)
    async def engine_error_handler(request: Request, exc: MemorySandboxError):
        status = STATUS_BY_CODE.get(exc.code, 500)
        body = {"code": exc.code, "message": exc.message, "http_status": status}
        headers = {}
        retry_after = getattr(exc, "retry_after", None)
        if retry_after is not None:
            body["retry_after"] = retry_after
            headers["Retry-After"] = str(retry_after)
        excess = getattr(exc, "excess", None)
        if excess is not None:
            body["excess"] = excess
        return JSONResponse(status_code=status, content=body, headers=headers)

    @app.get("/healthz")
    def healthz():
        return {"status": "ok"}

    @app.post("/workspaces", status_code=201)
    def create_workspace():
        ws = registry.create_workspace()
        return storage.workspace_to_document(ws)

    @app.get("/workspaces/{workspace_id}")
    def get_workspace(workspace_id: str):
        with registry.locked(workspace_id) as state:
            return storage.workspace_to_document(state.workspace)

    @app.post("/workspaces/{workspace_id}/conversations", status_code=201)
    def create_conversation(workspace_id: str, body: CreateConversationBody):
        defaults = registry.settings
        given = body.agent_config or AgentConfigBody()
        config = AgentConfig(
            model_name=given.model_name if given.model_name is not None else defaults.model_name,
            temperature=given.temperature if given.temperature is not None else core.DEFAULT_TEMPERATURE,
            token_budget=given.token_budget if given.token_budget is not None else defaults.token_budget,
        )
        position = body.canvas_position or PositionBody()
        with registry.mutating(workspace_id) as ws:
            conv = core.create_conversation(ws, body.title, config, (position.x, position.y))
            return {"conversation": conversation_json(conv), "revision": ws.revision}

    @app.post("/workspaces/{workspace_id}/conversations/{conv_id}/memories", status_code=201)
    def add_memory(workspace_id: str, conv_id: str, body: AddMemoryBody):
        with registry.mutating(workspace_id) as ws:
            obj = core.add_memory(ws, conv_id, body.role, body.kind, body.content, body.index)
            return {"memory": memory_json(obj), "revision": ws.revision}

    @app.patch("/workspaces/{workspace_id}/memories/{memory_id}")
    def edit_memory(workspace_id: str, memory_id: str, body: EditMemoryBody):
        with registry.mutating(workspace_id) as ws:
            obj = core.edit_memory(ws, memory_id, body.content)
            return {"memory": memory_json(obj), "revision": ws.revision}

    @app.delete("/workspaces/{workspace_id}/conversations/{conv_id}/memories/{memory_id}")
    def delete_memory(workspace_id: str, conv_id: str, memory_id: str):
        with registry.mutating(workspace_id) as ws:
            core.delete_memory(ws, conv_id, memory_id)
            return {"revision": ws.revision}

    @app.post(
        "/workspaces/{workspace_id}/conversations/{conv_id}/memories/{memory_id}/toggle-visibility"
    )
    def toggle_visibility(workspace_id: str, conv_id: str, memory_id: str):
        with registry.mutating(workspace_id) as ws:
            ref = core.toggle_visibility(ws, conv_id, memory_id)
            return {"ref": ref_json(ref), "revision": ws.revision}

    @app.post(
        "/workspaces/{workspace_id}/conversations/{conv_id}/memories/{memory_id}/reorder"
    )
    def reorder_memory(workspace_id: str, conv_id: str, memory_id: str, body: ReorderBody):
        with registry.mutating(workspace_id) as ws:
            core.reorder_memory(ws, conv_id, memory_id, body.new_index)
            return {"revision": ws.revision}

    @app.post("/workspaces/{workspace_id}/conversations/{conv_id}/share", status_code=201)
    def share_memory(workspace_id: str, conv_id: str, body: ShareBody):
        with registry.mutating(workspace_id) as ws:
            ref = core.share_memory(
                ws, body.src_conversation_id, body.memory_id, conv_id, body.index
            )
            return {"ref": ref_json(ref), "revision": ws.revision}

    @app.get("/workspaces/{workspace_id}/memories/{memory_id}/provenance")
    def memory_provenance(workspace_id: str, memory_id: str):
        with registry.locked(workspace_id) as state:
            return {"conversation_ids": core.provenance(state.workspace, memory_id)}

    @app.get("/workspaces/{workspace_id}/memories/{memory_id}/children")
    def summary_children(workspace_id: str, memory_id: str):
        with registry.locked(workspace_id) as state:
            children = summarizer.expand_summary(state.workspace, memory_id)
            return {"children": [memory_json(obj) for obj in children]}

    @app.get("/workspaces/{workspace_id}/conversations/{conv_id}/context")
    def context_preview(workspace_id: str, conv_id: str):
        with registry.locked(workspace_id) as state:
            return context_json(state.workspace, conv_id)

    @app.post("/workspaces/{workspace_id}/conversations/{conv_id}/messages", status_code=201)
    def send_message(workspace_id: str, conv_id: str, body: SendMessageBody):
        with registry.locked(workspace_id) as state:
            ws = state.workspace
            core.get_conversation(ws, conv_id)
            registry.mark_busy(state, conv_id)
            try:
                user_obj, request = gateway.start_turn(ws, conv_id, body.content)
                registry.persist(ws)
            except BaseException:
                registry.clear_busy(state, conv_id)
                raise
        try:
            response = gateway.chat(request, registry.backend)
        except LlmFailure:
            registry.clear_busy(state, conv_id)
            raise
        try:
            with state.lock:
                assistant_obj = gateway.finish_turn(ws, conv_id, response.content)
                registry.persist(ws)
        finally:
            registry.clear_busy(state, conv_id)
        return {
            "user": memory_json(user_obj),
            "assistant": memory_json(assistant_obj),
            "revision": ws.revision,
        }

    @app.post("/workspaces/{workspace_id}/conversations/{conv_id}/summarize", status_code=201)
    def summarize_memories(workspace_id: str, conv_id: str, body: SummarizeBody):
        with registry.locked(workspace_id) as state:
            ws = state.workspace
            core.get_conversation(ws, conv_id)
            registry.mark_busy(state, conv_id)
            try:
                request, ordered_ids, snapshot = summarizer.build_summary_request(
                    ws, conv_id, body.memory_ids
                )
            except BaseException:
                registry.clear_busy(state, conv_id)
                raise
        try:
            response = gateway.chat(request, registry.backend)
            with state.lock:
                summary = summarizer.apply_summary(
                    ws, conv_id, ordered_ids, response.content, snapshot
                )
                registry.persist(ws)
        finally:
            registry.clear_busy(state, conv_id)
        return {"memory": memory_json(summary), "revision": ws.revision}

    return app
