"""Deterministic construction of the message sequence an agent sees.

Assembly is a pure function of a workspace snapshot: visible references, in
conversation order, each contributing the pool object's role and content.
Hidden references contribute nothing; summaries contribute only their own
summary text, never their children. Nothing is ever truncated here — a context
that exceeds the budget is reported, not shrunk.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from . import core
from .core import Workspace

TokenEstimator = Callable[[str], int]

# Flat per-message cost added on top of the byte-count heuristic.
MESSAGE_OVERHEAD_TOKENS = 4


def default_estimator(text: str) -> int:
    """Crude provider-independent estimate: ceil(utf8_bytes / 4) + overhead."""
    return (len(text.encode("utf-8")) + 3) // 4 + MESSAGE_OVERHEAD_TOKENS


@dataclass(frozen=True)
class AssembledContext:
    """Exactly what the agent would see, with per-message provenance."""

    messages: tuple[tuple[str, str], ...]
    token_estimate: int
    included_ids: tuple[str, ...]


@dataclass(frozen=True)
class BudgetVerdict:
    ok: bool
    excess: int = 0


def estimate_tokens(text: str, estimator: TokenEstimator = default_estimator) -> int:
    return estimator(text)


def assemble(
    ws: Workspace,
    conv_id: str,
    estimator: TokenEstimator = default_estimator,
) -> AssembledContext:
    """Build the (role, content) sequence from the conversation's visible refs."""
    conv = core.get_conversation(ws, conv_id)
    messages: list[tuple[str, str]] = []
    included: list[str] = []
    total = 0
    for ref in conv.refs:
        if not ref.visible:
            continue
        obj = ws.pool[ref.memory_id]
        messages.append((obj.role, obj.content))
        included.append(obj.id)
        total += estimator(obj.content)
    return AssembledContext(
        messages=tuple(messages),
        token_estimate=total,
        included_ids=tuple(included),
    )


def check_budget(ctx: AssembledContext, budget: int) -> BudgetVerdict:
    """Budget verdict; the boundary (estimate == budget) is ok."""
    if ctx.token_estimate <= budget:
        return BudgetVerdict(ok=True)
    return BudgetVerdict(ok=False, excess=ctx.token_estimate - budget)
