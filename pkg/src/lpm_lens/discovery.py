"""Incremental top-k search for local process models, with support/determinism pruning."""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from itertools import permutations
from typing import Iterable, Iterator, Sequence

from .eventlog import EventLog, project_log
from .quality import EQUAL_WEIGHTS, QualityScore, Scorer, check_weights, model_of
from .tree import BINARY_OPS, COMMUTATIVE, LOOP, Leaf, Op, ProcessTree, canonical_form

logger = logging.getLogger(__name__)


class DiscoveryTimeout(RuntimeError):
    """Raised when discovery passes its deadline; ``partial`` holds the ranking so far."""

    def __init__(self, message: str, partial: "Ranking"):
        super().__init__(message)
        self.partial = partial


@dataclass(frozen=True)
class DiscoveryParams:
    top_k: int = 20
    support_prune: float = 0.0
    determinism_prune: float = 0.0
    max_activities: int = 4
    max_len: int = 5
    weights: tuple[float, ...] = EQUAL_WEIGHTS
    support_norm: str = "log-ratio"
    timeout: float | None = None

    def __post_init__(self):
        if self.top_k < 1:
            raise ValueError("top_k must be >= 1")
        if not 0 <= self.support_prune <= 1 or not 0 <= self.determinism_prune <= 1:
            raise ValueError("pruning thresholds must lie in [0, 1]")
        if self.max_activities < 2:
            raise ValueError("max_activities must be >= 2")
        object.__setattr__(self, "weights", check_weights(self.weights))


@dataclass(frozen=True)
class RankedModel:
    tree: ProcessTree
    score: QualityScore

    @property
    def key(self) -> str:
        return canonical_form(self.tree)

    def to_dict(self) -> dict:
        return {"model": self.key, "scores": self.score.to_dict()}


class Ranking(list):
    """Models sorted by weighted average, ties by canonical form; keys unique."""

    @classmethod
    def build(cls, models: Iterable[RankedModel], top_k: int | None = None) -> "Ranking":
        best: dict[str, RankedModel] = {}
        for m in models:
            cur = best.get(m.key)
            if cur is None or m.score.weighted_average > cur.score.weighted_average:
                best[m.key] = m
        ordered = sorted(best.values(), key=lambda m: (-m.score.weighted_average, m.key))
        return cls(ordered[:top_k] if top_k is not None else ordered)

    def keys(self) -> list[str]:
        return [m.key for m in self]

    def to_json(self) -> list[dict]:
        return [m.to_dict() for m in self]


@dataclass
class SearchStats:
    scored: int = 0
    pruned: int = 0
    per_level: dict[int, int] = field(default_factory=dict)
    candidates: set[str] = field(default_factory=set)


def _slots(a: str) -> tuple[ProcessTree, ProcessTree]:
    leaf = Leaf(a)
    return leaf, Op(LOOP, (leaf,))


def seed_trees(activities: Sequence[str]) -> Iterator[ProcessTree]:
    """All two-activity trees: each operator over each ordered pair, each
    leaf optionally wrapped in a loop."""
    for a, b in permutations(sorted(activities), 2):
        for op in BINARY_OPS:
            if op in COMMUTATIVE and b < a:
                continue
            for sa in _slots(a):
                for sb in _slots(b):
                    yield Op(op, (sa, sb))


def _replace_slot(tree: ProcessTree, activity: str, make) -> ProcessTree:
    """Rebuild ``tree`` with the slot holding ``activity`` replaced by ``make(slot)``.

    A slot is a leaf or a loop directly around a leaf.
    """
    if isinstance(tree, Leaf):
        return make(tree) if tree.activity == activity else tree
    if tree.op == LOOP and isinstance(tree.children[0], Leaf):
        return make(tree) if tree.children[0].activity == activity else tree
    return Op(tree.op, tuple(_replace_slot(c, activity, make) for c in tree.children))


def expansions(tree: ProcessTree, activities: Sequence[str]) -> Iterator[ProcessTree]:
    """Trees with one more activity: some slot ``x`` becomes ``op(x, c)`` or
    ``op(c, x)`` for a fresh activity ``c`` (itself optionally looped)."""
    used = set(tree.leaves)
    fresh = [c for c in sorted(activities) if c not in used]
    for a in tree.leaves:
        for c in fresh:
            for sc in _slots(c):
                for op in BINARY_OPS:
                    yield _replace_slot(tree, a, lambda s, op=op, sc=sc: Op(op, (s, sc)))
                    if op not in COMMUTATIVE:
                        yield _replace_slot(tree, a, lambda s, op=op, sc=sc: Op(op, (sc, s)))


def discover(log: EventLog, params: DiscoveryParams = DiscoveryParams(),
             stats: SearchStats | None = None, scorer: Scorer | None = None,
             deadline: float | None = None) -> Ranking:
    """Level-wise search from two-activity models up to ``max_activities``.

    A candidate whose support or determinism falls below the pruning
    thresholds is neither ranked nor expanded.
    """
    acts = log.activities
    if len(acts) < 2:
        logger.warning("log has fewer than two activities; nothing to discover")
        return Ranking()
    if deadline is None and params.timeout is not None:
        deadline = time.monotonic() + params.timeout
    scorer = scorer or Scorer(log, params.weights, params.max_len, params.support_norm)
    stats = stats if stats is not None else SearchStats()
    kept: list[RankedModel] = []
    seen: set[str] = set()

    def evaluate(trees: Iterable[ProcessTree]) -> list[ProcessTree]:
        survivors = []
        for t in trees:
            key = canonical_form(t)
            if key in seen:
                continue
            seen.add(key)
            if deadline is not None and time.monotonic() > deadline:
                raise DiscoveryTimeout("discovery deadline exceeded", Ranking.build(kept, params.top_k))
            s = scorer(model_of(t))
            stats.scored += 1
            stats.candidates.add(key)
            if s.support < params.support_prune or s.determinism < params.determinism_prune:
                stats.pruned += 1
                continue
            kept.append(RankedModel(t, s))
            survivors.append(t)
        return survivors

    frontier = evaluate(seed_trees(acts))
    stats.per_level[2] = len(frontier)
    for size in range(3, params.max_activities + 1):
        if not frontier:
            break
        frontier = evaluate(x for t in frontier for x in expansions(t, acts))
        stats.per_level[size] = len(frontier)
    return Ranking.build(kept, params.top_k)


def rescore(ranking: Iterable[RankedModel], scorer: Scorer) -> list[RankedModel]:
    return [RankedModel(m.tree, scorer(model_of(m.tree))) for m in ranking]


@dataclass
class ProjectedRun:
    ranking: Ranking
    per_projection_seconds: list[float]
    per_projection_cpu: list[float]


def discover_with_projections(log: EventLog, family: Sequence[Iterable[str]],
                              params: DiscoveryParams = DiscoveryParams(),
                              timings: ProjectedRun | None = None) -> Ranking:
    """Discover on each projected log, rescore every result on the full log,
    and keep the ``top_k`` distinct models."""
    family = [frozenset(q) for q in family]
    if not family:
        raise ValueError("projection family is empty")
    full_scorer = Scorer(log, params.weights, params.max_len, params.support_norm)
    pooled: list[RankedModel] = []
    for q in family:
        w0, c0 = time.perf_counter(), time.process_time()
        local = discover(project_log(log, q), params)
        pooled.extend(rescore(local, full_scorer))
        if timings is not None:
            timings.per_projection_seconds.append(time.perf_counter() - w0)
            timings.per_projection_cpu.append(time.process_time() - c0)
    ranking = Ranking.build(pooled, params.top_k)
    if timings is not None:
        timings.ranking = ranking
    return ranking
