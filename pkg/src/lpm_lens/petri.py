"""Accepting Petri nets translated from process trees, and their replay automaton."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .tree import AND, LOOP, SEQ, XOR, Leaf, ProcessTree, canonical_form

Marking = frozenset  # set of marked places; translated nets are 1-safe


@dataclass
class Transition:
    name: str
    label: str | None  # None is the silent label
    inputs: frozenset[str]
    outputs: frozenset[str]

    @property
    def silent(self) -> bool:
        return self.label is None


@dataclass
class AcceptingPetriNet:
    places: list[str] = field(default_factory=list)
    transitions: list[Transition] = field(default_factory=list)
    initial: Marking = frozenset()
    finals: tuple[Marking, ...] = ()

    @property
    def arcs(self) -> list[tuple[str, str]]:
        out = []
        for t in self.transitions:
            out.extend((p, t.name) for p in t.inputs)
            out.extend((t.name, p) for p in t.outputs)
        return out

    @property
    def labels(self) -> frozenset[str]:
        return frozenset(t.label for t in self.transitions if t.label is not None)

    def enabled(self, marking: Marking) -> list[Transition]:
        return [t for t in self.transitions if t.inputs <= marking]

    def fire(self, marking: Marking, t: Transition) -> Marking:
        if not t.inputs <= marking:
            raise ValueError(f"transition {t.name} is not enabled")
        rest = marking - t.inputs
        if rest & t.outputs:
            raise ValueError(f"firing {t.name} would put a second token on a place")
        return rest | t.outputs


class _Builder:
    def __init__(self):
        self.net = AcceptingPetriNet()
        self._n = 0

    def place(self) -> str:
        name = f"p{len(self.net.places)}"
        self.net.places.append(name)
        return name

    def transition(self, label, inputs, outputs) -> None:
        name = f"t{self._n}" if label is not None else f"tau{self._n}"
        self._n += 1
        self.net.transitions.append(Transition(name, label, frozenset(inputs), frozenset(outputs)))

    def build(self, node: ProcessTree, src: str, dst: str) -> None:
        if isinstance(node, Leaf):
            self.transition(node.activity, [src], [dst])
            return
        if node.op == SEQ:
            mid = self.place()
            self.build(node.children[0], src, mid)
            self.build(node.children[1], mid, dst)
        elif node.op == XOR:
            for c in node.children:
                self.build(c, src, dst)
        elif node.op == AND:
            ins = [self.place() for _ in node.children]
            outs = [self.place() for _ in node.children]
            self.transition(None, [src], ins)
            for c, pi, po in zip(node.children, ins, outs):
                self.build(c, pi, po)
            self.transition(None, outs, [dst])
        elif node.op == LOOP:
            # fresh inner places: a redo arc into a shared place would leak
            # behavior into sibling choices
            start, end = self.place(), self.place()
            self.transition(None, [src], [start])
            self.build(node.children[0], start, end)
            self.transition(None, [end], [start])
            self.transition(None, [end], [dst])
        else:  # pragma: no cover - guarded by Op
            raise ValueError(node.op)


def tree_to_net(tree: ProcessTree) -> AcceptingPetriNet:
    """Block-structured translation with one source and one sink place."""
    b = _Builder()
    source = b.place()
    sink = b.place()
    b.build(tree, source, sink)
    b.net.initial = frozenset({source})
    b.net.finals = (frozenset({sink}),)
    return b.net


class ReplayAutomaton:
    """Deterministic automaton over visible labels obtained by subset
    construction on the net's reachability graph with silent closure.

    Each state records whether it contains a final marking and how many
    distinct visible labels are enabled in it. State ``0`` is the initial
    state; ``-1`` is the dead state.
    """

    def __init__(self, net: AcceptingPetriNet, max_states: int = 100_000):
        self.net = net
        finals = set(net.finals)
        self._states: list[frozenset[Marking]] = []
        self._index: dict[frozenset[Marking], int] = {}
        self.accepting: list[bool] = []
        self.enabled_labels: list[frozenset[str]] = []
        self.delta: list[dict[str, int]] = []
        start = self._closure({net.initial})
        self._add(start, finals)
        i = 0
        while i < len(self._states):
            state = self._states[i]
            moves: dict[str, set[Marking]] = {}
            for m in state:
                for t in net.enabled(m):
                    if not t.silent:
                        moves.setdefault(t.label, set()).add(net.fire(m, t))
            row = {}
            for label in sorted(moves):
                nxt = self._closure(moves[label])
                j = self._index.get(nxt)
                if j is None:
                    if len(self._states) >= max_states:
                        raise RuntimeError("replay automaton exceeds state limit (unbounded net?)")
                    j = self._add(nxt, finals)
                row[label] = j
            self.delta[i] = row
            i += 1

    def _closure(self, markings: Iterable[Marking]) -> frozenset[Marking]:
        seen = set(markings)
        stack = list(seen)
        while stack:
            m = stack.pop()
            for t in self.net.enabled(m):
                if t.silent:
                    m2 = self.net.fire(m, t)
                    if m2 not in seen:
                        seen.add(m2)
                        stack.append(m2)
        return frozenset(seen)

    def _add(self, state: frozenset[Marking], finals) -> int:
        j = len(self._states)
        self._states.append(state)
        self._index[state] = j
        self.accepting.append(any(m in finals for m in state))
        labels = frozenset(t.label for m in state for t in self.net.enabled(m) if not t.silent)
        self.enabled_labels.append(labels)
        self.delta.append({})
        return j

    @property
    def n_states(self) -> int:
        return len(self._states)

    def run(self, trace: Sequence[str]) -> int:
        s = 0
        for a in trace:
            s = self.delta[s].get(a, -1)
            if s < 0:
                return -1
        return s

    def accepts(self, trace: Sequence[str]) -> bool:
        s = self.run(trace)
        return s >= 0 and self.accepting[s]


def to_dot(net: AcceptingPetriNet, title: str = "") -> str:
    """Graphviz DOT text; the initial place carries a token, final places are hatched."""
    initial = set(net.initial)
    final = {p for m in net.finals for p in m}
    lines = ["digraph lpm {", "  rankdir=LR;"]
    if title:
        lines.append(f"  label={_q(title)};")
    for p in net.places:
        attrs = ['shape=circle', 'label=""', 'width=0.3']
        if p in initial:
            attrs[1] = 'label="&#9679;"'
        if p in final:
            attrs.append('style=filled fillcolor="gray" peripheries=2')
        lines.append(f"  {p} [{' '.join(attrs)}];")
    for t in net.transitions:
        if t.silent:
            lines.append(f'  {t.name} [shape=box style=filled fillcolor=black label="" width=0.15];')
        else:
            lines.append(f"  {t.name} [shape=box label={_q(t.label)}];")
    for a, b in net.arcs:
        lines.append(f"  {a} -> {b};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _q(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def tree_to_dot(tree: ProcessTree) -> str:
    return to_dot(tree_to_net(tree), canonical_form(tree))
