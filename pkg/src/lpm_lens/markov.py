"""Projection sets from Markov clustering of the activity connectedness graph."""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .eventlog import EventLog
from .family import maximal_sets
from .stats import connectedness_matrix, row_normalize

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MclParams:
    inflation: float = 1.5
    expansion_power: int = 2
    prune_threshold: float = 1e-5
    max_iterations: int = 100
    convergence_epsilon: float = 1e-8
    # weight w of the lazy walk (1 - w) P + w I; 0 leaves the matrix as is
    self_loop: float = 0.0

    def __post_init__(self):
        if not self.inflation > 1:
            raise ValueError("inflation must be > 1")
        if self.expansion_power < 2:
            raise ValueError("expansion_power must be >= 2")
        if self.prune_threshold < 0:
            raise ValueError("prune_threshold must be >= 0")
        if not 0 <= self.self_loop < 1:
            raise ValueError("self_loop must lie in [0, 1)")


@dataclass
class MclResult:
    clusters: list[frozenset[int]]
    matrix: np.ndarray
    iterations: int
    converged: bool


def _renormalize(M: np.ndarray) -> np.ndarray:
    sums = M.sum(axis=1, keepdims=True)
    return M / sums


def mcl_matrix(P: np.ndarray, params: MclParams = MclParams()) -> MclResult:
    """Run MCL on a row-stochastic matrix and read clusters by attractors.

    Expansion is a matrix power, inflation an entrywise power followed by
    row renormalization; entries below ``prune_threshold`` are zeroed after
    inflation. An attractor is a node keeping mass on its own column; its
    cluster is every node with positive mass on that column. Clusters may
    overlap. Indices refer to rows of ``P``.
    """
    P = np.asarray(P, dtype=float)
    if P.ndim != 2 or P.shape[0] != P.shape[1]:
        raise ValueError("MCL needs a square matrix")
    if np.any(P < 0) or not np.allclose(P.sum(axis=1), 1.0, atol=1e-9):
        raise ValueError("MCL input must be row-stochastic")

    M = P.copy()
    converged = False
    it = 0
    for it in range(1, params.max_iterations + 1):
        nxt = np.linalg.matrix_power(M, params.expansion_power)
        nxt = _renormalize(nxt ** params.inflation)
        if params.prune_threshold > 0:
            nxt[nxt < params.prune_threshold] = 0.0
            nxt = _renormalize(nxt)
        delta = np.abs(nxt - M).max()
        M = nxt
        if delta < params.convergence_epsilon:
            converged = True
            break
    if not converged:
        logger.warning("MCL did not converge in %d iterations", params.max_iterations)

    support = M > 0
    clusters = []
    for j in np.flatnonzero(np.diag(M) > 0):
        clusters.append(frozenset(int(i) for i in np.flatnonzero(support[:, j])))
    # nodes attracted only by non-attractor columns cannot occur in a converged
    # limit, but guard against a truncated run leaving some node unassigned
    covered = set().union(*clusters) if clusters else set()
    for i in range(M.shape[0]):
        if i not in covered:
            clusters.append(frozenset({i}))
    return MclResult(maximal_sets(clusters), M, it, converged)


def mcl(P: np.ndarray, labels, params: MclParams = MclParams()) -> list[frozenset[str]]:
    """Cluster a row-stochastic matrix; ``labels[i]`` names row ``i``."""
    res = mcl_matrix(P, params)
    return maximal_sets(frozenset(labels[i] for i in c) for c in res.clusters)


def discover_markov_projections(log: EventLog, params: MclParams = MclParams()) -> list[frozenset[str]]:
    """Clusters of the row-normalized connectedness matrix, singletons dropped.

    Directed chains without self-mass make MCL oscillate; a positive
    ``params.self_loop`` damps that at the cost of departing from the plain
    normalized matrix.
    """
    if not log.activities:
        raise ValueError("cannot cluster a log without activities")
    P = row_normalize(connectedness_matrix(log))
    if params.self_loop:
        P = (1 - params.self_loop) * P + params.self_loop * np.eye(len(P))
    clusters = mcl(P, log.activities, params)
    return [c for c in clusters if len(c) >= 2]
