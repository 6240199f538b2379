"""Model-based property tests: random op sequences against the naive model.

Two layers: a hypothesis state machine (good shrinking, catches ordering and
aliasing bugs) and the seeded SequenceRunner from conftest (bulk randomized
coverage reused by the acceptance suite).
"""

from __future__ import annotations

import random

from hypothesis import settings
from hypothesis import strategies as st
from hypothesis.stateful import RuleBasedStateMachine, initialize, invariant, precondition, rule

from conftest import ReferenceModel, SequenceRunner, engine_state, random_text
from memsandbox import core
from memsandbox.gateway import MockBackend
from memsandbox.summarizer import summarize

TEXTS = st.text(
    alphabet=st.characters(codec="utf-8", min_codepoint=32),
    min_size=1,
    max_size=24,
)


class WorkspaceMachine(RuleBasedStateMachine):
    @initialize()
    def setup(self):
        self.ws = core.create_workspace()
        self.model = ReferenceModel()
        self.backend = MockBackend()
        self.expected_revision = 0

    # -- helpers -----------------------------------------------------------

    def conv_at(self, fraction: float):
        convs = self.ws.conversations
        return convs[int(fraction * len(convs)) % len(convs)]

    def ref_of(self, conv, fraction: float):
        return conv.refs[int(fraction * len(conv.refs)) % len(conv.refs)]

    def has_conversations(self):
        return bool(getattr(self, "ws", None) and self.ws.conversations)

    def has_refs(self):
        return self.has_conversations() and any(c.refs for c in self.ws.conversations)

    # -- rules --------------------------------------------------------------

    @rule(title=TEXTS)
    @precondition(lambda self: hasattr(self, "ws") and len(getattr(self.ws, "conversations", [])) < 8)
    def new_conversation(self, title):
        conv = core.create_conversation(self.ws, title)
        self.model.new_conversation(conv.id)
        self.expected_revision += 1

    @rule(pick=st.floats(0, 0.999), role=st.sampled_from(core.ROLES),
          kind=st.sampled_from(("message", "note")), content=TEXTS,
          where=st.floats(0, 1))
    @precondition(lambda self: self.has_conversations() and len(self.ws.pool) < 32)
    def add(self, pick, role, kind, content, where):
        conv = self.conv_at(pick)
        index = int(where * (len(conv.refs) + 1)) % (len(conv.refs) + 1)
        obj = core.add_memory(self.ws, conv.id, role, kind, content, index)
        self.model.add(conv.id, obj.id, role, kind, content, index)
        self.expected_revision += 1

    @rule(pick=st.floats(0, 0.999), content=TEXTS)
    @precondition(lambda self: getattr(self, "ws", None) and self.ws.pool)
    def edit(self, pick, content):
        ids = sorted(self.ws.pool)
        memory_id = ids[int(pick * len(ids)) % len(ids)]
        core.edit_memory(self.ws, memory_id, content)
        self.model.edit(memory_id, content)
        self.expected_revision += 1

    @rule(pick=st.floats(0, 0.999), which=st.floats(0, 0.999))
    @precondition(lambda self: self.has_refs())
    def toggle(self, pick, which):
        conv = next(
            c for c in self.ws.conversations[int(pick * 8) % len(self.ws.conversations):]
            + self.ws.conversations if c.refs
        )
        ref = self.ref_of(conv, which)
        core.toggle_visibility(self.ws, conv.id, ref.memory_id)
        self.model.toggle(conv.id, ref.memory_id)
        self.expected_revision += 1

    @rule(pick=st.floats(0, 0.999), which=st.floats(0, 0.999))
    @precondition(lambda self: self.has_refs())
    def delete(self, pick, which):
        conv = next(
            c for c in self.ws.conversations[int(pick * 8) % len(self.ws.conversations):]
            + self.ws.conversations if c.refs
        )
        ref = self.ref_of(conv, which)
        core.delete_memory(self.ws, conv.id, ref.memory_id)
        self.model.delete(conv.id, ref.memory_id)
        self.expected_revision += 1

    @rule(pick=st.floats(0, 0.999), which=st.floats(0, 0.999), where=st.floats(0, 0.999))
    @precondition(lambda self: self.has_refs())
    def reorder(self, pick, which, where):
        conv = next(
            c for c in self.ws.conversations[int(pick * 8) % len(self.ws.conversations):]
            + self.ws.conversations if c.refs
        )
        ref = self.ref_of(conv, which)
        new_index = int(where * len(conv.refs)) % len(conv.refs)
        core.reorder_memory(self.ws, conv.id, ref.memory_id, new_index)
        self.model.reorder(conv.id, ref.memory_id, new_index)
        self.expected_revision += 1

    @rule(pick=st.floats(0, 0.999), where=st.floats(0, 1))
    @precondition(lambda self: self.has_conversations() and len(self.ws.conversations) >= 2)
    def share(self, pick, where):
        pairs = []
        for src in self.ws.conversations:
            for dst in self.ws.conversations:
                if src.id == dst.id:
                    continue
                dst_ids = {r.memory_id for r in dst.refs}
                pairs.extend(
                    (src, r.memory_id, dst)
                    for r in src.refs if r.memory_id not in dst_ids
                )
        if not pairs:
            return
        src, memory_id, dst = pairs[int(pick * len(pairs)) % len(pairs)]
        index = int(where * (len(dst.refs) + 1)) % (len(dst.refs) + 1)
        core.share_memory(self.ws, src.id, memory_id, dst.id, index)
        self.model.share(memory_id, dst.id, index)
        self.expected_revision += 1

    @rule(pick=st.floats(0, 0.999), count=st.integers(2, 4))
    @precondition(lambda self: self.has_conversations() and len(self.ws.pool) < 32
                  and any(len(c.refs) >= 2 for c in self.ws.conversations))
    def collapse(self, pick, count):
        candidates = [c for c in self.ws.conversations if len(c.refs) >= 2]
        conv = candidates[int(pick * len(candidates)) % len(candidates)]
        take = min(count, len(conv.refs))
        selected = [r.memory_id for r in conv.refs[:take]]
        summary = summarize(self.ws, conv.id, selected, self.backend)
        self.model.summarize(conv.id, selected, summary.id, summary.content)
        self.expected_revision += 1

    # -- invariants -----------------------------------------------------------

    @invariant()
    def engine_matches_model(self):
        if not hasattr(self, "ws"):
            return
        assert engine_state(self.ws) == self.model.state()

    @invariant()
    def pool_equals_reachable_set(self):
        if not hasattr(self, "ws"):
            return
        assert set(self.ws.pool) == self.model.reachable()

    @invariant()
    def no_engine_invariant_violated(self):
        if not hasattr(self, "ws"):
            return
        assert core.find_violation(self.ws) is None

    @invariant()
    def revision_counts_mutations(self):
        if not hasattr(self, "ws"):
            return
        assert self.ws.revision == self.expected_revision


WorkspaceMachine.TestCase.settings = settings(
    max_examples=60, stateful_step_count=30, deadline=None
)
TestWorkspaceMachine = WorkspaceMachine.TestCase


def test_seeded_random_sequences_small():
    # Bulk version (1,000 sequences) runs in the acceptance suite.
    for seed in range(40):
        runner = SequenceRunner(random.Random(seed))
        runner.run(30)
        runner.check()


def test_random_text_is_never_empty():
    rng = random.Random(0)
    assert all(random_text(rng) for _ in range(100))
