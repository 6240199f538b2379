"""Shared test helpers: independent oracles, a naive reference model, and a
random op-sequence driver that checks engine state against the model after
every step.

Everything here is deliberately written from the raw state definitions, not by
calling back into the code under test, so the comparisons stay meaningful.
"""

from __future__ import annotations

import copy
import math
import random
from functools import reduce

from memsandbox import core
from memsandbox.errors import MemorySandboxError, ProviderError
from memsandbox.gateway import MockBackend
from memsandbox.summarizer import summarize


# ---------------------------------------------------------------------------
# Independent oracles


def estimate_oracle(text: str) -> int:
    return math.ceil(len(text.encode("utf-8")) / 4) + 4


def assembly_oracle(ws, conv_id, estimate=estimate_oracle):
    """Filter-map recomputation of assembly from raw workspace state."""
    conv = next(c for c in ws.conversations if c.id == conv_id)
    messages = []
    included = []
    total = 0
    for ref in conv.refs:
        if ref.visible:
            obj = ws.pool[ref.memory_id]
            messages.append((obj.role, obj.content))
            included.append(obj.id)
            total += estimate(obj.content)
    return messages, included, total


def fnv1a64_oracle(data: bytes) -> int:
    """Reduce-style FNV-1a 64, independent of the gateway's loop."""
    return reduce(
        lambda h, byte: ((h ^ byte) * 0x100000001B3) % 2**64,
        data,
        0xCBF29CE484222325,
    )


def mock_reply_oracle(messages) -> str:
    blob = "".join(role + "\x1f" + content + "\x1e" for role, content in messages)
    return "MOCK(%d|%s)" % (len(messages), format(fnv1a64_oracle(blob.encode("utf-8")), "016x")[:8])


def reachable_oracle(objects: dict, convs) -> set[str]:
    """Recursive reachability over (conversation refs, summary children)."""
    seen: set[str] = set()

    def visit(memory_id: str) -> None:
        if memory_id in seen:
            return
        seen.add(memory_id)
        for child in objects.get(memory_id, {}).get("children", ()):
            visit(child)

    for _, refs in convs:
        for memory_id, _ in refs:
            visit(memory_id)
    return seen


# ---------------------------------------------------------------------------
# Naive reference model


class ReferenceModel:
    """Plain dict/list shadow of workspace semantics.

    The model is told which ids the engine minted; everything else (ordering,
    visibility, replacement, reachability) is recomputed with naive list code.
    """

    def __init__(self):
        self.objects: dict[str, dict] = {}
        self.convs: list[tuple[str, list]] = []

    def _refs(self, conv_id: str) -> list:
        return next(refs for cid, refs in self.convs if cid == conv_id)

    def new_conversation(self, conv_id: str) -> None:
        self.convs.append((conv_id, []))

    def add(self, conv_id, memory_id, role, kind, content, index) -> None:
        self.objects[memory_id] = {
            "role": role, "kind": kind, "content": content, "children": (),
        }
        self._refs(conv_id).insert(index, (memory_id, True))

    def edit(self, memory_id, content) -> None:
        self.objects[memory_id]["content"] = content

    def delete(self, conv_id, memory_id) -> None:
        refs = self._refs(conv_id)
        refs.remove(next(r for r in refs if r[0] == memory_id))

    def toggle(self, conv_id, memory_id) -> None:
        refs = self._refs(conv_id)
        i = next(i for i, r in enumerate(refs) if r[0] == memory_id)
        refs[i] = (memory_id, not refs[i][1])

    def reorder(self, conv_id, memory_id, new_index) -> None:
        refs = self._refs(conv_id)
        i = next(i for i, r in enumerate(refs) if r[0] == memory_id)
        refs.insert(new_index, refs.pop(i))

    def share(self, memory_id, dst_conv_id, index) -> None:
        self._refs(dst_conv_id).insert(index, (memory_id, True))

    def summarize(self, conv_id, selected_ids, summary_id, content) -> None:
        refs = self._refs(conv_id)
        selected = set(selected_ids)
        ordered = [m for m, _ in refs if m in selected]
        first = next(i for i, r in enumerate(refs) if r[0] in selected)
        kept = [r for r in refs if r[0] not in selected]
        kept.insert(first, (summary_id, True))
        refs[:] = kept
        self.objects[summary_id] = {
            "role": "system", "kind": "summary", "content": content,
            "children": tuple(ordered),
        }

    def reachable(self) -> set[str]:
        return reachable_oracle(self.objects, self.convs)

    def state(self):
        live = self.reachable()
        return {
            "pool": {
                memory_id: (
                    obj["role"], obj["kind"], obj["content"], tuple(obj["children"]),
                )
                for memory_id, obj in self.objects.items()
                if memory_id in live
            },
            "convs": [(cid, tuple(refs)) for cid, refs in self.convs],
        }


def engine_state(ws):
    return {
        "pool": {
            memory_id: (obj.role, obj.kind, obj.content, tuple(obj.children))
            for memory_id, obj in ws.pool.items()
        },
        "convs": [
            (conv.id, tuple((ref.memory_id, ref.visible) for ref in conv.refs))
            for conv in ws.conversations
        ],
    }


# ---------------------------------------------------------------------------
# Random op-sequence driver

WORDS = [
    "plan", "trip", "tokyo", "budget", "flight", "hotel", "café", "ramen",
    "museum", "日本", "메모", "schedule", "notes", "deadline", "review", "α β γ",
]


def random_text(rng: random.Random) -> str:
    return " ".join(rng.choice(WORDS) for _ in range(rng.randint(1, 6)))


class SequenceRunner:
    """Applies random valid ops to the engine and the reference model in
    lockstep, verifying full-state agreement (including garbage collection
    and the revision counter) after every step.
    """

    def __init__(self, rng: random.Random, max_conversations=8, max_memories=32,
                 check_every_step=True):
        self.rng = rng
        self.ws = core.create_workspace()
        self.model = ReferenceModel()
        self.backend = MockBackend()
        self.max_conversations = max_conversations
        self.max_memories = max_memories
        self.memories_created = 0
        self.expected_revision = 0
        self.check_every_step = check_every_step

    # -- helpers

    def _conv_ids(self):
        return [conv.id for conv in self.ws.conversations]

    def _random_conv(self):
        return self.rng.choice(self.ws.conversations)

    def check(self):
        assert core.find_violation(self.ws) is None
        assert engine_state(self.ws) == self.model.state()
        assert set(self.ws.pool) == self.model.reachable()
        assert self.ws.revision == self.expected_revision

    # -- op implementations (each returns True if it mutated anything)

    def op_new_conversation(self):
        if len(self.ws.conversations) >= self.max_conversations:
            return False
        conv = core.create_conversation(
            self.ws, random_text(self.rng),
            position=(self.rng.uniform(-500, 500), self.rng.uniform(-500, 500)),
        )
        self.model.new_conversation(conv.id)
        self.expected_revision += 1
        return True

    def op_add(self):
        if not self.ws.conversations or self.memories_created >= self.max_memories:
            return False
        conv = self._random_conv()
        role = self.rng.choice(core.ROLES)
        kind = self.rng.choice(("message", "note"))
        content = random_text(self.rng)
        index = self.rng.randint(0, len(conv.refs))
        obj = core.add_memory(self.ws, conv.id, role, kind, content, index)
        self.model.add(conv.id, obj.id, role, kind, content, index)
        self.memories_created += 1
        self.expected_revision += 1
        return True

    def op_edit(self):
        if not self.ws.pool:
            return False
        memory_id = self.rng.choice(sorted(self.ws.pool))
        content = random_text(self.rng)
        core.edit_memory(self.ws, memory_id, content)
        self.model.edit(memory_id, content)
        self.expected_revision += 1
        return True

    def op_delete(self):
        targets = [
            (conv, ref) for conv in self.ws.conversations for ref in conv.refs
        ]
        if not targets:
            return False
        conv, ref = self.rng.choice(targets)
        core.delete_memory(self.ws, conv.id, ref.memory_id)
        self.model.delete(conv.id, ref.memory_id)
        self.expected_revision += 1
        return True

    def op_toggle(self):
        targets = [
            (conv, ref) for conv in self.ws.conversations for ref in conv.refs
        ]
        if not targets:
            return False
        conv, ref = self.rng.choice(targets)
        core.toggle_visibility(self.ws, conv.id, ref.memory_id)
        self.model.toggle(conv.id, ref.memory_id)
        self.expected_revision += 1
        return True

    def op_reorder(self):
        candidates = [conv for conv in self.ws.conversations if conv.refs]
        if not candidates:
            return False
        conv = self.rng.choice(candidates)
        ref = self.rng.choice(conv.refs)
        new_index = self.rng.randint(0, len(conv.refs) - 1)
        core.reorder_memory(self.ws, conv.id, ref.memory_id, new_index)
        self.model.reorder(conv.id, ref.memory_id, new_index)
        self.expected_revision += 1
        return True

    def op_share(self):
        if len(self.ws.conversations) < 2:
            return False
        for _ in range(4):  # random probing beats enumerating all pairs
            src = self._random_conv()
            dst = self._random_conv()
            if src.id == dst.id or not src.refs:
                continue
            memory_id = self.rng.choice(src.refs).memory_id
            if any(ref.memory_id == memory_id for ref in dst.refs):
                continue
            index = self.rng.randint(0, len(dst.refs))
            core.share_memory(self.ws, src.id, memory_id, dst.id, index)
            self.model.share(memory_id, dst.id, index)
            self.expected_revision += 1
            return True
        return False

    def op_summarize(self):
        if self.memories_created >= self.max_memories:
            return False
        candidates = [conv for conv in self.ws.conversations if len(conv.refs) >= 2]
        if not candidates:
            return False
        conv = self.rng.choice(candidates)
        count = self.rng.randint(2, len(conv.refs))
        selected = [ref.memory_id for ref in self.rng.sample(conv.refs, count)]
        summary = summarize(self.ws, conv.id, selected, self.backend)
        self.model.summarize(conv.id, selected, summary.id, summary.content)
        self.memories_created += 1
        self.expected_revision += 1
        return True

    def op_summarize_failure(self):
        candidates = [conv for conv in self.ws.conversations if len(conv.refs) >= 2]
        if not candidates:
            return False
        conv = self.rng.choice(candidates)
        selected = [ref.memory_id for ref in self.rng.sample(conv.refs, 2)]
        before = copy.deepcopy(self.ws)
        failing = MockBackend(fail_with=ProviderError("injected failure"))
        try:
            summarize(self.ws, conv.id, selected, failing)
        except ProviderError:
            pass
        assert self.ws == before
        return True

    def op_send(self):
        if not self.ws.conversations or self.memories_created + 2 > self.max_memories:
            return False
        from memsandbox.gateway import send_message

        conv = self._random_conv()
        text = random_text(self.rng)
        try:
            user_obj, assistant_obj = send_message(self.ws, conv.id, text, self.backend)
        except MemorySandboxError:
            return False  # over budget against a tiny configured budget
        refs = self.model._refs(conv.id)
        self.model.add(conv.id, user_obj.id, "user", "message", text, len(refs))
        self.model.add(
            conv.id, assistant_obj.id, "assistant", "message",
            assistant_obj.content, len(refs),
        )
        self.memories_created += 2
        self.expected_revision += 2
        return True

    OPS = (
        ("new_conversation", 2),
        ("add", 6),
        ("edit", 3),
        ("delete", 2),
        ("toggle", 3),
        ("reorder", 3),
        ("share", 3),
        ("summarize", 2),
        ("summarize_failure", 1),
        ("send", 2),
    )

    def step(self):
        names = [name for name, weight in self.OPS for _ in range(weight)]
        self.rng.shuffle(names)
        for name in names:
            if getattr(self, f"op_{name}")():
                break
        if self.check_every_step:
            self.check()

    def run(self, steps: int):
        if not self.ws.conversations:
            self.op_new_conversation()
            if self.check_every_step:
                self.check()
        for _ in range(steps):
            self.step()


def random_workspace(rng: random.Random, steps=40, **kwargs):
    """A random, invariant-respecting workspace grown by valid ops."""
    runner = SequenceRunner(rng, check_every_step=False, **kwargs)
    runner.run(steps)
    return runner.ws


# ---------------------------------------------------------------------------
# Live-server plumbing for concurrency and conformance tests


class GatedBackend:
    """Backend that parks inside complete() until released by the test."""

    def __init__(self):
        import threading

        self.entered = threading.Event()
        self.release = threading.Event()
        self.inner = MockBackend()

    def complete(self, request):
        self.entered.set()
        if not self.release.wait(timeout=15):
            raise ProviderError("gate never released")
        return self.inner.complete(request)


class LiveServer:
    """uvicorn on a loopback ephemeral port, run in a daemon thread."""

    def __init__(self, app):
        import socket
        import threading

        import uvicorn

        with socket.socket() as probe:
            probe.bind(("127.0.0.1", 0))
            self.port = probe.getsockname()[1]
        config = uvicorn.Config(app, host="127.0.0.1", port=self.port, log_level="warning")
        self.server = uvicorn.Server(config)
        self.thread = threading.Thread(target=self.server.run, daemon=True)

    @property
    def base_url(self):
        return f"http://127.0.0.1:{self.port}"

    def __enter__(self):
        import time

        self.thread.start()
        deadline = time.time() + 10
        while not self.server.started:
            if time.time() > deadline:
                raise RuntimeError("server did not start")
            time.sleep(0.01)
        return self

    def __exit__(self, *exc_info):
        self.server.should_exit = True
        self.thread.join(timeout=10)
