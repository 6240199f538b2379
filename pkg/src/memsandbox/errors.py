"""Error types shared by the engine, the LLM gateway, and the HTTP service.

Every error carries a stable machine-readable ``code`` (the class name) so the
service layer can map it to an HTTP status without string matching.
"""

from __future__ import annotations


class MemorySandboxError(Exception):
    """Base class for all engine-originated errors."""

    code = "Internal"

    def __init__(self, message: str = ""):
        super().__init__(message or self.code)
        self.message = message or self.code


class UnknownWorkspace(MemorySandboxError):
    code = "UnknownWorkspace"


class UnknownConversation(MemorySandboxError):
    code = "UnknownConversation"


class UnknownMemory(MemorySandboxError):
    code = "UnknownMemory"


class NotReferenced(MemorySandboxError):
    """The conversation does not hold a reference to the memory object."""

    code = "NotReferenced"


class AlreadyReferenced(MemorySandboxError):
    """The destination conversation already references the memory object."""

    code = "AlreadyReferenced"


class IndexOutOfRange(MemorySandboxError):
    code = "IndexOutOfRange"


class EmptyContent(MemorySandboxError):
    code = "EmptyContent"


class InvalidConfig(MemorySandboxError):
    code = "InvalidConfig"


class TooFewSelected(MemorySandboxError):
    """Summarization needs at least two distinct memory objects."""

    code = "TooFewSelected"


class NotASummary(MemorySandboxError):
    code = "NotASummary"


class OverBudget(MemorySandboxError):
    """Assembled context exceeds the conversation's token budget.

    Surfaced to the user instead of silently truncating; ``excess`` is how many
    estimated tokens must be freed (by hiding, deleting, or summarizing).
    """

    code = "OverBudget"

    def __init__(self, excess: int, message: str = ""):
        super().__init__(message or f"context exceeds token budget by {excess} tokens")
        self.excess = excess


class ConversationBusy(MemorySandboxError):
    """A send or summarize call is already in flight for this conversation."""

    code = "ConversationBusy"


class StaleRevision(MemorySandboxError):
    """The conversation changed between the summarize snapshot and its commit."""

    code = "StaleRevision"


class LlmFailure(MemorySandboxError):
    """Base class for chat-backend failures; the workspace is never mutated."""

    code = "LlmFailure"


class AuthError(LlmFailure):
    code = "AuthError"


class RateLimited(LlmFailure):
    code = "RateLimited"

    def __init__(self, message: str = "", retry_after: float | None = None):
        super().__init__(message)
        self.retry_after = retry_after


class ProviderError(LlmFailure):
    code = "ProviderError"


class LlmTimeout(LlmFailure):
    code = "Timeout"


class SchemaMismatch(MemorySandboxError):
    """Document declares an unsupported schema version or unknown fields."""

    code = "SchemaMismatch"


class CorruptDocument(MemorySandboxError):
    """Document parsed but violates a workspace invariant; names the first one."""

    code = "CorruptDocument"
