"""Projection sets grown by maximal relative information gain (MRIG)."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .eventlog import EventLog, project_log
from .family import grow_sets, maximal_sets
from .stats import connectedness_matrix, statistic_entropies

DEFAULT_MRIG_THRESHOLD = 0.1


class StatisticEntropies:
    """Memoized per-activity ``H(dfr(a, L|A))`` and ``H(dpr(a, L|A))``."""

    def __init__(self, log: EventLog):
        self.log = log
        self._cache: dict[frozenset[str], dict[str, tuple[float, float]]] = {}

    def __call__(self, activities) -> dict[str, tuple[float, float]]:
        key = frozenset(activities)
        val = self._cache.get(key)
        if val is None:
            proj = project_log(self.log, key)
            hf, hp = statistic_entropies(proj)
            val = {a: (float(hf[i]), float(hp[i])) for i, a in enumerate(proj.activities)}
            self._cache[key] = val
        return val


def _gain(before: float, after: float) -> float:
    return 0.0 if before == 0 else (before - after) / before


def mrig(grown, base, log: EventLog, entropies: StatisticEntropies | None = None) -> float:
    """Largest relative entropy drop of any dfr/dpr vector of an activity in
    ``base`` when the projection grows from ``base`` to ``grown``.

    A statistic with zero entropy under ``base`` contributes a gain of 0.
    The value is negative when every statistic gets more uncertain.
    """
    grown, base = frozenset(grown), frozenset(base)
    if not base <= grown:
        raise ValueError("MRIG needs the base projection set to be a subset of the grown one")
    if not base:
        raise ValueError("MRIG of an empty base set is undefined")
    ent = entropies or StatisticEntropies(log)
    hb, ha = ent(base), ent(grown)
    best = -np.inf
    for a in sorted(base):
        fb, pb = hb.get(a, (0.0, 0.0))
        fa, pa = ha.get(a, (0.0, 0.0))
        best = max(best, _gain(fb, fa), _gain(pb, pa))
    return float(best)


@dataclass
class MrigTrace:
    """Witness record: for each accepted set, the base it grew from and the gain."""
    witnesses: dict[frozenset[str], tuple[frozenset[str], float] | None] = field(default_factory=dict)

    def chain(self, s: frozenset[str]) -> list[tuple[frozenset[str], frozenset[str] | None, float | None]]:
        """Steps ``(set, base, gain)`` from ``s`` back to its bootstrap pair."""
        steps = []
        cur = frozenset(s)
        while cur in self.witnesses:
            w = self.witnesses[cur]
            if w is None:
                steps.append((cur, None, None))
                break
            steps.append((cur, w[0], w[1]))
            cur = w[0]
        return steps


def _adjacent_pairs(log: EventLog, record: MrigTrace):
    """Second-generation seed: candidate pairs adjacent somewhere in the log."""
    M = connectedness_matrix(log)
    link = (M + M.T) > 0
    idx = log.index

    def seed(candidates):
        pairs = [c for c in candidates if link[tuple(idx[a] for a in sorted(c))]]
        for p in pairs:
            record.witnesses.setdefault(p, None)
        return pairs

    return seed


def discover_mrig_projections(log: EventLog, threshold: float = DEFAULT_MRIG_THRESHOLD,
                              bootstrap_pairs: bool = True,
                              trace: MrigTrace | None = None) -> list[frozenset[str]]:
    """Maximal sets reachable by one-activity steps each gaining more than ``threshold``.

    All singleton statistics have zero entropy, so no pair could ever be
    accepted by gain. With ``bootstrap_pairs`` the second generation is
    instead every pair of activities that are adjacent somewhere in the log;
    the gain filter applies from the third generation on.
    """
    if threshold < 0:
        raise ValueError("MRIG threshold must be >= 0")
    if len(log.activities) < 2:
        raise ValueError("MRIG projections need at least two activities")
    ent = StatisticEntropies(log)
    record = trace if trace is not None else MrigTrace()

    def accept(A, previous):
        for a in sorted(A):
            B = A - {a}
            if B in previous:
                g = mrig(A, B, log, ent)
                if g > threshold:
                    record.witnesses.setdefault(A, (B, g))
                    return True
        return False

    seed = _adjacent_pairs(log, record) if bootstrap_pairs else None
    accepted = grow_sets(log.activities, accept, seed_generation=seed)
    family = maximal_sets(s for gen in accepted for s in gen)
    return [s for s in family if len(s) >= 2]
