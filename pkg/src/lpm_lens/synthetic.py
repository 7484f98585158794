"""Synthetic event logs with planted local process models."""
from __future__ import annotations

import random
from typing import Sequence

from .eventlog import EventLog
from .tree import AND, LOOP, SEQ, XOR, Leaf, ProcessTree, parse_tree

PLANTED_PATTERNS = (
    "seq(a1,a2,xor(a3,a4))",
    "seq(b1,and(b2,b3),b4)",
    "seq(loop(c1),c2,c3,c4)",
)


def sample_trace(tree: ProcessTree, rng: random.Random, loop_continue: float = 0.3) -> list[str]:
    """One random trace of the tree's language."""
    if isinstance(tree, Leaf):
        return [tree.activity]
    if tree.op == SEQ:
        return sample_trace(tree.children[0], rng, loop_continue) + sample_trace(tree.children[1], rng, loop_continue)
    if tree.op == XOR:
        return sample_trace(rng.choice(tree.children), rng, loop_continue)
    if tree.op == AND:
        return interleave([sample_trace(c, rng, loop_continue) for c in tree.children], rng)
    if tree.op == LOOP:
        out = sample_trace(tree.children[0], rng, loop_continue)
        while rng.random() < loop_continue:
            out += sample_trace(tree.children[0], rng, loop_continue)
        return out
    raise ValueError(tree.op)


def interleave(parts: Sequence[Sequence[str]], rng: random.Random) -> list[str]:
    """Uniformly random merge of sequences, each keeping its internal order."""
    slots = [i for i, p in enumerate(parts) for _ in p]
    rng.shuffle(slots)
    its = [iter(p) for p in parts]
    return [next(its[i]) for i in slots]


def planted_log(patterns: Sequence[str] = PLANTED_PATTERNS, n_traces: int = 50,
                instances_per_trace: tuple[int, int] = (1, 3), noise_events: tuple[int, int] = (0, 2),
                overlap: float = 0.2, seed: int = 0) -> EventLog:
    """Traces made of instances of distinct patterns plus noise.

    Instances follow each other in random order; with probability
    ``overlap`` an instance is interleaved with the one before it instead.
    Noise events, drawn uniformly from all pattern activities, are then
    inserted at random positions.
    """
    rng = random.Random(seed)
    trees = [parse_tree(p) for p in patterns]
    alphabet = sorted({a for t in trees for a in t.leaves})
    traces = []
    for _ in range(n_traces):
        k = rng.randint(*instances_per_trace)
        chosen = rng.sample(range(len(trees)), min(k, len(trees)))
        trace: list[str] = []
        last: list[str] = []
        for i in chosen:
            inst = sample_trace(trees[i], rng)
            if last and rng.random() < overlap:
                trace = trace[:-len(last)] + interleave([last, inst], rng)
            else:
                trace += inst
            last = inst
        for _ in range(rng.randint(*noise_events)):
            trace.insert(rng.randint(0, len(trace)), rng.choice(alphabet))
        traces.append(tuple(trace))
    return EventLog(traces)
