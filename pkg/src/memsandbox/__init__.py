"""memsandbox: conversational memory as user-manipulable objects.

The engine keeps an agent's conversational history in a workspace-wide pool
of memory objects that conversations reference by position and visibility.
Users (or scripts, through the HTTP service) can hide, edit, reorder, delete,
summarize, and share those objects across conversations, and can inspect the
exact context any agent will receive before it is sent.
"""

from .assembly import (
    AssembledContext,
    BudgetVerdict,
    assemble,
    check_budget,
    default_estimator,
    estimate_tokens,
)
from .core import (
    AgentConfig,
    Conversation,
    MemoryObject,
    MemoryRef,
    Workspace,
    add_memory,
    create_conversation,
    create_workspace,
    delete_memory,
    edit_memory,
    find_violation,
    provenance,
    reorder_memory,
    share_memory,
    toggle_visibility,
)
from .gateway import ChatRequest, ChatResponse, HttpBackend, MockBackend, chat, send_message
from .storage import load, save
from .summarizer import expand_summary, summarize

__all__ = [
    "AgentConfig",
    "AssembledContext",
    "BudgetVerdict",
    "ChatRequest",
    "ChatResponse",
    "Conversation",
    "HttpBackend",
    "MemoryObject",
    "MemoryRef",
    "MockBackend",
    "Workspace",
    "add_memory",
    "assemble",
    "chat",
    "check_budget",
    "create_conversation",
    "create_workspace",
    "default_estimator",
    "delete_memory",
    "edit_memory",
    "estimate_tokens",
    "expand_summary",
    "find_violation",
    "load",
    "provenance",
    "reorder_memory",
    "save",
    "send_message",
    "share_memory",
    "summarize",
    "toggle_visibility",
]

__version__ = "0.1.0"
