"""Chat-completions wire client plus a deterministic offline mock.

The live backend speaks the standard chat-completions JSON protocol against
any compatible endpoint. The mock backend replies ``MOCK(<n>|<h>)`` where
``n`` is the message count and ``h`` fingerprints the exact role/content
sequence, so tests can assert precisely what context reached the model
without parsing natural language.
"""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass, field

import httpx

from . import assembly, core
from .core import MemoryObject, Workspace
from .errors import (
    AuthError,
    EmptyContent,
    LlmTimeout,
    OverBudget,
    ProviderError,
    RateLimited,
)

logger = logging.getLogger(__name__)

DEFAULT_PROVIDER_URL = "https://api.openai.com/v1"
DEFAULT_TIMEOUT_SECONDS = 60.0
API_KEY_ENV = "MEMSANDBOX_API_KEY"

_FNV64_OFFSET = 0xCBF29CE484222325
_FNV64_PRIME = 0x100000001B3
_MOCK_FIELD_SEP = "\x1f"
_MOCK_MESSAGE_SEP = "\x1e"


@dataclass(frozen=True)
class ChatRequest:
    model_name: str
    messages: tuple[tuple[str, str], ...]
    temperature: float


@dataclass(frozen=True)
class ChatResponse:
    content: str
    finish_reason: str  # "stop" or "length"; failures raise instead


def fnv1a64(data: bytes) -> int:
    """64-bit FNV-1a over raw bytes."""
    h = _FNV64_OFFSET
    for byte in data:
        h ^= byte
        h = (h * _FNV64_PRIME) & 0xFFFFFFFFFFFFFFFF
    return h


def mock_reply(messages: tuple[tuple[str, str], ...]) -> str:
    """Deterministic reply encoding message count and a content fingerprint."""
    blob = "".join(
        f"{role}{_MOCK_FIELD_SEP}{content}{_MOCK_MESSAGE_SEP}" for role, content in messages
    )
    digest = f"{fnv1a64(blob.encode('utf-8')):016x}"
    return f"MOCK({len(messages)}|{digest[:8]})"


@dataclass
class MockBackend:
    """Offline backend: pure function of the request, records every call."""

    requests: list[ChatRequest] = field(default_factory=list)
    fail_with: Exception | None = None

    def complete(self, request: ChatRequest) -> ChatResponse:
        self.requests.append(request)
        if self.fail_with is not None:
            raise self.fail_with
        return ChatResponse(content=mock_reply(request.messages), finish_reason="stop")

    def close(self) -> None:
        pass


class HttpBackend:
    """Live backend: one POST to {base_url}/chat/completions per call.

    The bearer credential is read from ``MEMSANDBOX_API_KEY`` unless given
    explicitly. No implicit retries: rate limiting is surfaced once and retry
    policy belongs to callers.
    """

    def __init__(
        self,
        base_url: str = DEFAULT_PROVIDER_URL,
        api_key: str | None = None,
        timeout: float = DEFAULT_TIMEOUT_SECONDS,
        transport: httpx.BaseTransport | None = None,
    ):
        self.base_url = base_url.rstrip("/")
        self.api_key = api_key if api_key is not None else os.environ.get(API_KEY_ENV)
        self._client = httpx.Client(timeout=timeout, transport=transport)

    def complete(self, request: ChatRequest) -> ChatResponse:
        body = {
            "model": request.model_name,
            "messages": [{"role": r, "content": c} for r, c in request.messages],
            "temperature": request.temperature,
        }
        headers = {}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        try:
            response = self._client.post(
                f"{self.base_url}/chat/completions", json=body, headers=headers
            )
        except httpx.TimeoutException as exc:
            raise LlmTimeout(f"provider did not answer in time: {exc}") from exc
        except httpx.HTTPError as exc:
            raise ProviderError(f"transport failure: {exc}") from exc
        return self._parse(response)

    def _parse(self, response: httpx.Response) -> ChatResponse:
        status = response.status_code
        if status in (401, 403):
            raise AuthError(f"provider rejected credentials (HTTP {status})")
        if status == 429:
            retry_after = None
            header = response.headers.get("retry-after")
            if header is not None:
                try:
                    retry_after = float(header)
                except ValueError:
                    retry_after = None
            raise RateLimited("provider rate limit hit (HTTP 429)", retry_after=retry_after)
        if status != 200:
            raise ProviderError(f"provider returned HTTP {status}")
        try:
            payload = response.json()
            choice = payload["choices"][0]
            content = choice["message"]["content"]
            finish_reason = choice.get("finish_reason", "stop")
        except (ValueError, LookupError, TypeError) as exc:
            raise ProviderError(f"malformed provider response: {exc}") from exc
        if not isinstance(content, str) or not content:
            raise ProviderError("provider returned no content")
        if finish_reason not in ("stop", "length"):
            finish_reason = "stop"
        return ChatResponse(content=content, finish_reason=finish_reason)

    def close(self) -> None:
        self._client.close()


def chat(request: ChatRequest, backend) -> ChatResponse:
    """Send one chat request through the given backend."""
    if not request.messages:
        raise ValueError("chat request must contain at least one message")
    for role, _ in request.messages:
        if role not in core.ROLES:
            raise ValueError(f"invalid message role {role!r}")
    return backend.complete(request)


def start_turn(
    ws: Workspace,
    conv_id: str,
    user_text: str,
    estimator: assembly.TokenEstimator = assembly.default_estimator,
) -> tuple[MemoryObject, ChatRequest]:
    """Validate, budget-check, append the user message, and build the request.

    Raises before any mutation or network activity if the text is empty or the
    context plus the new message would exceed the conversation's budget. The
    returned request is exactly the assembled context including the new turn.
    """
    conv = core.get_conversation(ws, conv_id)
    if not user_text:
        raise EmptyContent("message content must be non-empty")
    ctx = assembly.assemble(ws, conv_id, estimator)
    projected = ctx.token_estimate + estimator(user_text)
    budget = conv.agent_config.token_budget
    if projected > budget:
        raise OverBudget(projected - budget)
    user_obj = core.add_memory(ws, conv_id, "user", "message", user_text, len(conv.refs))
    ctx = assembly.assemble(ws, conv_id, estimator)
    request = ChatRequest(
        model_name=conv.agent_config.model_name,
        messages=ctx.messages,
        temperature=conv.agent_config.temperature,
    )
    return user_obj, request


def finish_turn(ws: Workspace, conv_id: str, assistant_text: str) -> MemoryObject:
    """Append the assistant reply at the end of the conversation."""
    conv = core.get_conversation(ws, conv_id)
    return core.add_memory(
        ws, conv_id, "assistant", "message", assistant_text, len(conv.refs)
    )


def send_message(
    ws: Workspace,
    conv_id: str,
    user_text: str,
    backend,
) -> tuple[MemoryObject, MemoryObject]:
    """One conversational turn: append user text, call the agent, append reply.

    If the backend fails, the user message stays (those words were said) and
    the failure propagates to the caller.
    """
    user_obj, request = start_turn(ws, conv_id, user_text)
    response = chat(request, backend)
    assistant_obj = finish_turn(ws, conv_id, response.content)
    return user_obj, assistant_obj
