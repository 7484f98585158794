"""Process trees for local process models.

Operators are binary sequence (``seq``), exclusive choice (``xor``) and
concurrency (``and``) plus the unary one-or-more loop (``loop``). Leaves carry
distinct activity labels; there are no silent leaves.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Union

SEQ, XOR, AND, LOOP = "seq", "xor", "and", "loop"
BINARY_OPS = (SEQ, XOR, AND)
COMMUTATIVE = frozenset({XOR, AND})


@dataclass(frozen=True)
class Leaf:
    activity: str

    @property
    def leaves(self) -> tuple[str, ...]:
        return (self.activity,)

    def __str__(self):
        return canonical_form(self)


@dataclass(frozen=True)
class Op:
    op: str
    children: tuple

    def __post_init__(self):
        if self.op == LOOP:
            if len(self.children) != 1:
                raise ValueError("loop takes exactly one child")
        elif self.op in BINARY_OPS:
            if len(self.children) != 2:
                raise ValueError(f"{self.op} takes exactly two children")
        else:
            raise ValueError(f"unknown operator {self.op!r}")

    @cached_property
    def leaves(self) -> tuple[str, ...]:
        return tuple(a for c in self.children for a in c.leaves)

    @cached_property
    def canonical(self) -> str:
        if self.op == LOOP:
            return f"loop({canonical_form(self.children[0])})"
        parts = [canonical_form(c) for c in _flat_children(self)]
        if self.op in COMMUTATIVE:
            parts.sort()
        return f"{self.op}({','.join(parts)})"

    def __str__(self):
        return canonical_form(self)


ProcessTree = Union[Leaf, Op]


def seq(left, right) -> Op:
    return Op(SEQ, (_wrap(left), _wrap(right)))


def xor(left, right) -> Op:
    return Op(XOR, (_wrap(left), _wrap(right)))


def par(left, right) -> Op:
    return Op(AND, (_wrap(left), _wrap(right)))


def loop(body) -> Op:
    return Op(LOOP, (_wrap(body),))


def _wrap(x) -> ProcessTree:
    return Leaf(x) if isinstance(x, str) else x


def validate(tree: ProcessTree, max_activities: int | None = None) -> None:
    leaves = tree.leaves
    if len(set(leaves)) != len(leaves):
        raise ValueError(f"duplicate activity labels in {canonical_form(tree)}")
    if len(leaves) < 2:
        raise ValueError("a local process model needs at least two activities")
    if max_activities is not None and len(leaves) > max_activities:
        raise ValueError(f"tree has {len(leaves)} activities, limit is {max_activities}")


_BARE = re.compile(r"^[A-Za-z0-9_.:\-]+$")
_RESERVED = frozenset(BINARY_OPS + (LOOP,))


def _label(a: str) -> str:
    return a if _BARE.match(a) and a not in _RESERVED else json.dumps(a)


def _flat_children(tree: Op) -> list:
    out = []
    for c in tree.children:
        if isinstance(c, Op) and c.op == tree.op and tree.op != LOOP:
            out.extend(_flat_children(c))
        else:
            out.append(c)
    return out


def canonical_form(tree: ProcessTree) -> str:
    """Deterministic text for a tree, identical for language-equal rewrites
    that only re-associate operators or reorder ``xor``/``and`` children.

    >>> canonical_form(xor("b", "a"))
    'xor(a,b)'
    >>> canonical_form(seq(seq("a", "b"), "c"))
    'seq(a,b,c)'
    """
    if isinstance(tree, Leaf):
        return _label(tree.activity)
    return tree.canonical


_TOKEN = re.compile(r'\s*(?:(?P<str>"(?:[^"\\]|\\.)*")|(?P<word>[A-Za-z0-9_.:\-]+)|(?P<punct>[(),]))')


def parse_tree(text: str) -> ProcessTree:
    """Inverse of :func:`canonical_form`; n-ary operators nest to the right."""
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse process tree at offset {pos}: {text!r}")
        if m.group("str"):
            tokens.append(("name", json.loads(m.group("str"))))
        elif m.group("word"):
            tokens.append(("word", m.group("word")))
        else:
            tokens.append(("p", m.group("punct")))
        pos = m.end()

    def node(i):
        kind, val = tokens[i]
        if kind == "word" and val in _RESERVED and i + 1 < len(tokens) and tokens[i + 1] == ("p", "("):
            children = []
            i += 2
            while True:
                child, i = node(i)
                children.append(child)
                if tokens[i] == ("p", ","):
                    i += 1
                    continue
                if tokens[i] == ("p", ")"):
                    i += 1
                    break
                raise ValueError(f"unexpected token {tokens[i][1]!r}")
            if val == LOOP:
                if len(children) != 1:
                    raise ValueError("loop takes exactly one child")
                return Op(LOOP, (children[0],)), i
            if len(children) < 2:
                raise ValueError(f"{val} needs at least two children")
            acc = children[-1]
            for c in reversed(children[:-1]):
                acc = Op(val, (c, acc))
            return acc, i
        if kind in ("word", "name"):
            return Leaf(val), i + 1
        raise ValueError(f"unexpected token {val!r}")

    try:
        tree, end = node(0)
    except IndexError:
        raise ValueError(f"truncated process tree: {text!r}") from None
    if end != len(tokens):
        raise ValueError(f"trailing input in process tree: {text!r}")
    return tree


def min_length(tree: ProcessTree) -> int:
    if isinstance(tree, Leaf):
        return 1
    if tree.op == XOR:
        return min(min_length(c) for c in tree.children)
    if tree.op == LOOP:
        return min_length(tree.children[0])
    return sum(min_length(c) for c in tree.children)


def _shuffles(x: tuple, y: tuple) -> set[tuple]:
    n = len(x) + len(y)
    out = set()
    for pos in combinations(range(n), len(x)):
        pset = set(pos)
        xi, yi = iter(x), iter(y)
        out.add(tuple(next(xi) if k in pset else next(yi) for k in range(n)))
    return out


def bounded_language(tree: ProcessTree, max_len: int) -> frozenset[tuple[str, ...]]:
    """All traces of the tree's language with at most ``max_len`` events."""
    if max_len < 1:
        raise ValueError("max_len must be >= 1")
    return frozenset(_lang(tree, max_len))


def _lang(tree: ProcessTree, n: int) -> set[tuple]:
    if n <= 0:
        return set()
    if isinstance(tree, Leaf):
        return {(tree.activity,)}
    if tree.op == XOR:
        return _lang(tree.children[0], n) | _lang(tree.children[1], n)
    if tree.op == LOOP:
        body = _lang(tree.children[0], n)
        out = set(body)
        frontier = set(body)
        while frontier:
            frontier = {x + y for x in frontier for y in body if len(x) + len(y) <= n} - out
            out |= frontier
        return out
    left, right = tree.children
    lx = _lang(left, n - min_length(right))
    ly = _lang(right, n - min_length(left))
    if tree.op == SEQ:
        return {x + y for x in lx for y in ly if len(x) + len(y) <= n}
    out = set()
    for x in lx:
        for y in ly:
            if len(x) + len(y) <= n:
                out |= _shuffles(x, y)
    return out
