"""Projection sets grown under a bound on the entropy of the projected log statistics."""
from __future__ import annotations

import logging

from .eventlog import EventLog, project_log
from .family import grow_sets, maximal_sets
from .stats import total_entropy

logger = logging.getLogger(__name__)

DEFAULT_ENTROPY_RATIO = 0.7


class ProjectedEntropy:
    """Memoized ``Ent(L|A)`` for one log."""

    def __init__(self, log: EventLog):
        self.log = log
        self._cache: dict[frozenset[str], float] = {}
        self.full = total_entropy(log)

    def __call__(self, activities) -> float:
        key = frozenset(activities)
        val = self._cache.get(key)
        if val is None:
            val = total_entropy(project_log(self.log, key))
            self._cache[key] = val
        return val


def discover_entropy_projections(log: EventLog, ratio: float = DEFAULT_ENTROPY_RATIO,
                                 generations: list | None = None) -> list[frozenset[str]]:
    """Maximal activity sets whose projected log has ``Ent <= ratio * Ent(L)``.

    Sets grow one activity at a time from singletons and only accepted sets
    are extended. If ``generations`` is a list, the accepted sets of each
    generation are appended to it.
    """
    if not 0 <= ratio <= 1:
        raise ValueError("entropy ratio must lie in [0, 1]")
    if len(log.activities) < 2:
        raise ValueError("entropy projections need at least two activities")
    ent = ProjectedEntropy(log)
    bound = ratio * ent.full
    if ent.full == 0:
        logger.info("log statistics have zero entropy; every projection passes the bound")
    accepted = grow_sets(log.activities, lambda A, _prev: ent(A) <= bound)
    if generations is not None:
        generations.extend(accepted)
    family = maximal_sets(s for gen in accepted for s in gen)
    return [s for s in family if len(s) >= 2]
