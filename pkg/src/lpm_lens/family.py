"""Projection families: collections of activity sets with no nested members."""
from __future__ import annotations

from typing import Iterable


def maximal_sets(sets: Iterable[Iterable]) -> list[frozenset]:
    """Drop duplicates and every set that is a proper subset of another."""
    uniq = {frozenset(s) for s in sets}
    ordered = sorted(uniq, key=lambda s: (-len(s), sorted(s)))
    keep: list[frozenset[str]] = []
    for s in ordered:
        if not any(s < k for k in keep):
            keep.append(s)
    return sort_family(keep)


def sort_family(sets: Iterable[frozenset[str]]) -> list[frozenset[str]]:
    """Deterministic order: by sorted member list."""
    return sorted((frozenset(s) for s in sets), key=lambda s: sorted(s))


def is_antichain(sets: Iterable[frozenset[str]]) -> bool:
    sets = list(sets)
    return all(not (a < b) for a in sets for b in sets)


def family_to_json(sets: Iterable[frozenset[str]]) -> list[list[str]]:
    return [sorted(s) for s in sort_family(sets)]


def family_from_json(data) -> list[frozenset[str]]:
    if not isinstance(data, list) or not all(isinstance(s, list) for s in data):
        raise ValueError("projection family must be a JSON list of lists of activity names")
    return [frozenset(s) for s in data]


def grow_sets(alphabet, accept, seed_generation=None, on_generation=None):
    """Level-wise growth of activity sets, one activity per generation.

    Generation 1 is the singletons. Each later generation extends every
    accepted set of the previous one by one activity it lacks; ``accept(A,
    previous_accepted)`` filters the candidates. ``seed_generation``, if given,
    replaces the filtered second generation. Growth stops when a generation
    is empty or some candidate equals the whole alphabet. Returns the
    accepted sets of every generation, singletons first.
    """
    alphabet = sorted(alphabet)
    full = frozenset(alphabet)
    current = [frozenset({a}) for a in alphabet]
    accepted_all = [current]
    while current:
        candidates = sorted({a_set | {b} for a_set in current for b in alphabet if b not in a_set},
                            key=lambda s: sorted(s))
        if not candidates:
            break
        if seed_generation is not None and len(accepted_all) == 1:
            nxt = sorted({frozenset(s) for s in seed_generation(candidates)}, key=lambda s: sorted(s))
        else:
            previous = set(current)
            nxt = [c for c in candidates if accept(c, previous)]
        if on_generation is not None:
            on_generation(len(accepted_all) + 1, candidates, nxt)
        if nxt:
            accepted_all.append(nxt)
        current = nxt
        if full in candidates:
            break
    return accepted_all
