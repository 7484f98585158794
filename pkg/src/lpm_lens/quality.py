"""Segmentation-based replay of a log on a local process model and its quality scores."""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from typing import Sequence

from .eventlog import EventLog, project_log, project_trace
from .petri import ReplayAutomaton, tree_to_net
from .tree import ProcessTree, bounded_language, canonical_form, parse_tree

SCORE_NAMES = ("support", "confidence", "language_fit", "determinism", "coverage")
EQUAL_WEIGHTS = (0.2, 0.2, 0.2, 0.2, 0.2)
SUPPORT_NORMALIZERS = ("log-ratio", "c/(c+traces)")


@dataclass(frozen=True)
class QualityScore:
    support: float
    confidence: float
    language_fit: float
    determinism: float
    coverage: float
    weighted_average: float
    weights: tuple[float, ...] = EQUAL_WEIGHTS
    segments: int = 0

    def values(self) -> tuple[float, ...]:
        return (self.support, self.confidence, self.language_fit, self.determinism, self.coverage)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["weights"] = list(self.weights)
        return d


def check_weights(weights: Sequence[float]) -> tuple[float, ...]:
    w = tuple(float(x) for x in weights)
    if len(w) != 5 or any(x < 0 for x in w) or abs(sum(w) - 1) > 1e-9:
        raise ValueError("weights must be five non-negative numbers summing to 1")
    return w


@dataclass
class Segmentation:
    """Fitting segments of one (projected) trace as half-open index ranges."""
    trace: tuple[str, ...]
    segments: list[tuple[int, int]] = field(default_factory=list)

    @property
    def fitting_event_count(self) -> int:
        return sum(j - i for i, j in self.segments)

    @property
    def fitting_segment_count(self) -> int:
        return len(self.segments)

    def parts(self) -> list[tuple[bool, tuple[str, ...]]]:
        """Alternating ``(fits, events)`` pieces, gaps included even when empty."""
        out, pos = [], 0
        for i, j in self.segments:
            out.append((False, self.trace[pos:i]))
            out.append((True, self.trace[i:j]))
            pos = j
        out.append((False, self.trace[pos:]))
        return out


class LocalProcessModel:
    """A process tree together with its net and replay automaton."""

    def __init__(self, tree: ProcessTree):
        self.tree = tree
        self.activities = frozenset(tree.leaves)
        self.net = tree_to_net(tree)
        self.automaton = ReplayAutomaton(self.net)
        self.key = canonical_form(tree)
        self._lang: dict[int, frozenset] = {}

    def language(self, max_len: int) -> frozenset[tuple[str, ...]]:
        if max_len not in self._lang:
            self._lang[max_len] = bounded_language(self.tree, max_len)
        return self._lang[max_len]

    def segment(self, trace: Sequence[str]) -> Segmentation:
        """Maximize events inside fitting segments.

        Backward dynamic program over start positions. Ties prefer fewer
        segments, then a segment starting as early as possible, then the
        shortest such segment.
        """
        delta, accepting = self.automaton.delta, self.automaton.accepting
        trace = tuple(trace)
        n = len(trace)
        best = [(0, 0)] * (n + 1)      # (fitting events, -segments) for trace[j:]
        choice = [None] * (n + 1)
        for j in range(n - 1, -1, -1):
            top, pick = best[j + 1], None
            s = 0
            for i in range(j, n):
                s = delta[s].get(trace[i], -1)
                if s < 0:
                    break
                if accepting[s]:
                    ev, negseg = best[i + 1]
                    cand = (ev + i + 1 - j, negseg - 1)
                    if cand > top or (cand == top and pick is None):
                        top, pick = cand, i + 1
            best[j], choice[j] = top, pick
        segs, j = [], 0
        while j < n:
            if choice[j] is None:
                j += 1
            else:
                segs.append((j, choice[j]))
                j = choice[j]
        return Segmentation(trace, segs)


@lru_cache(maxsize=8192)
def _shared_model(key: str) -> LocalProcessModel:
    return LocalProcessModel(parse_tree(key))


def model_of(tree: ProcessTree) -> LocalProcessModel:
    """A cached model for ``tree``. Trees with the same canonical form have
    the same language and share one net and automaton."""
    return _shared_model(canonical_form(tree))


def segment_trace(trace: Sequence[str], tree: ProcessTree | LocalProcessModel) -> Segmentation:
    model = tree if isinstance(tree, LocalProcessModel) else model_of(tree)
    return model.segment(project_trace(trace, model.activities))


def harmonic_mean(ratios: Sequence[float]) -> float:
    if not ratios or any(r <= 0 for r in ratios):
        return 0.0
    return len(ratios) / sum(1.0 / r for r in ratios)


def normalize_support(c: float, log: EventLog, normalizer: str = "log-ratio") -> float:
    if normalizer == "log-ratio":
        denom = math.log1p(log.n_events)
        return 0.0 if denom == 0 else min(1.0, math.log1p(c) / denom)
    if normalizer == "c/(c+traces)":
        return 0.0 if c == 0 else c / (c + log.n_traces)
    raise ValueError(f"unknown support normalizer {normalizer!r}")


class Scorer:
    """Scores models against one log, caching projections of it per activity set."""

    def __init__(self, log: EventLog, weights: Sequence[float] = EQUAL_WEIGHTS, max_len: int = 5,
                 support_norm: str = "log-ratio"):
        self.log = log
        self.weights = check_weights(weights)
        self.max_len = max_len
        if support_norm not in SUPPORT_NORMALIZERS:
            raise ValueError(f"unknown support normalizer {support_norm!r}")
        self.support_norm = support_norm
        self.counts = log.activity_counts()
        self.n_events = log.n_events
        self._proj: dict[frozenset[str], EventLog] = {}

    def projected(self, activities: frozenset[str]) -> EventLog:
        p = self._proj.get(activities)
        if p is None:
            p = project_log(self.log, activities)
            self._proj[activities] = p
        return p

    def __call__(self, model: ProcessTree | LocalProcessModel) -> QualityScore:
        if not isinstance(model, LocalProcessModel):
            model = model_of(model)
        acts = model.activities
        missing = acts - set(self.counts)
        if missing:
            raise ValueError(f"activities {sorted(missing)} do not occur in the log")
        covered = sum(self.counts[a] for a in acts)
        coverage = covered / self.n_events if self.n_events else 0.0

        enabled = model.automaton.enabled_labels
        delta = model.automaton.delta
        fitting: Counter = Counter()
        observed: set = set()
        n_segments = 0
        firings = 0
        enabled_sum = 0
        for trace, mult in self.projected(acts).items():
            seg = model.segment(trace)
            for i, j in seg.segments:
                xi = trace[i:j]
                n_segments += mult
                observed.add(xi)
                s = 0
                for a in xi:
                    fitting[a] += mult
                    enabled_sum += len(enabled[s]) * mult
                    firings += mult
                    s = delta[s][a]

        if n_segments == 0:
            support = confidence = language_fit = determinism = 0.0
        else:
            support = normalize_support(n_segments, self.log, self.support_norm)
            confidence = harmonic_mean([fitting[a] / self.counts[a] for a in sorted(acts)])
            lang = model.language(self.max_len)
            language_fit = len(observed & lang) / len(lang)
            determinism = min(1.0, firings / enabled_sum)
        values = (support, confidence, language_fit, determinism, coverage)
        wavg = sum(w * v for w, v in zip(self.weights, values))
        return QualityScore(*values, weighted_average=wavg, weights=self.weights, segments=n_segments)


def score(tree: ProcessTree | LocalProcessModel, log: EventLog, weights: Sequence[float] = EQUAL_WEIGHTS,
          max_len: int = 5, support_norm: str = "log-ratio") -> QualityScore:
    """The five quality criteria of a model on ``log`` and their weighted average."""
    return Scorer(log, weights, max_len, support_norm)(tree)
