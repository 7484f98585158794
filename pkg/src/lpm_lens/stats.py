"""Directly-follows statistics, entropies of log statistics, connectedness."""
from __future__ import annotations

import numpy as np

from .eventlog import EventLog, project_log


def follows_counts(log: EventLog) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(F, n)`` where ``F[i, j]`` counts ``i`` directly followed by
    ``j`` and ``n[i]`` counts occurrences of ``i``, weighted by multiplicity."""
    k = len(log.activities)
    F = np.zeros((k, k))
    n = np.zeros(k)
    for trace, mult in log.encoded():
        for a in trace:
            n[a] += mult
        for a, b in zip(trace, trace[1:]):
            F[a, b] += mult
    return F, n


def dfr_matrix(log: EventLog) -> np.ndarray:
    """Row ``i`` is the vector ``dfr(i, L)`` in the log's activity order."""
    F, n = follows_counts(log)
    return F / n[:, None]


def dpr_matrix(log: EventLog) -> np.ndarray:
    """Row ``i`` is the vector ``dpr(i, L)``: share of ``i`` preceded by each ``j``."""
    F, n = follows_counts(log)
    return F.T / n[:, None]


def dfr(a: str, b: str, log: EventLog) -> float:
    """Fraction of occurrences of ``a`` directly followed by ``b``; 0 if ``a`` is absent."""
    if a not in log.index or b not in log.index:
        return 0.0
    return float(dfr_matrix(log)[log.index[a], log.index[b]])


def dpr(a: str, b: str, log: EventLog) -> float:
    """Fraction of occurrences of ``a`` directly preceded by ``b``; 0 if ``a`` is absent."""
    if a not in log.index or b not in log.index:
        return 0.0
    return float(dpr_matrix(log)[log.index[a], log.index[b]])


def entropy(x) -> float:
    """Shannon entropy in bits of a non-negative vector, ``0 log 0 = 0``.

    The vector is not renormalized: dfr/dpr vectors lose mass at trace
    boundaries and are used as they are.
    """
    x = np.asarray(x, dtype=float).ravel()
    if np.any(x < 0):
        raise ValueError("entropy is defined for non-negative vectors")
    nz = x[x > 0]
    return float(-(nz * np.log2(nz)).sum())


def _row_entropies(P: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(P > 0, -P * np.log2(np.where(P > 0, P, 1.0)), 0.0)
    return terms.sum(axis=1)


def statistic_entropies(log: EventLog) -> tuple[np.ndarray, np.ndarray]:
    """Per-activity ``(H(dfr(a, L)), H(dpr(a, L)))`` in the log's activity order."""
    if not log.activities:
        return np.zeros(0), np.zeros(0)
    F, n = follows_counts(log)
    return _row_entropies(F / n[:, None]), _row_entropies(F.T / n[:, None])


def total_entropy(log: EventLog) -> float:
    hf, hp = statistic_entropies(log)
    return float(hf.sum() + hp.sum())


def projected_entropy(log: EventLog, activities) -> float:
    return total_entropy(project_log(log, activities))


def connectedness_matrix(log: EventLog) -> np.ndarray:
    """``M[i, j] = sqrt(dpr(i, j)^2 + dfr(j, i)^2)``.

    Both terms count ``j`` directly followed by ``i``, normalized by the
    occurrences of ``i`` and of ``j`` respectively.
    """
    if not log.activities:
        raise ValueError("connectedness of an empty log is undefined")
    F, n = follows_counts(log)
    dp = F.T / n[:, None]        # dp[i, j] = dpr(i, j)
    df = F / n[:, None]          # df[j, i] = dfr(j, i)
    return np.sqrt(dp ** 2 + df.T ** 2)


def row_normalize(M: np.ndarray) -> np.ndarray:
    """Row-stochastic version of ``M``; all-zero rows become self-loops."""
    M = np.asarray(M, dtype=float)
    if np.any(M < 0):
        raise ValueError("row_normalize expects non-negative entries")
    out = M.copy()
    sums = out.sum(axis=1)
    zero = sums == 0
    out[~zero] /= sums[~zero, None]
    idx = np.flatnonzero(zero)
    out[idx, :] = 0.0
    out[idx, idx] = 1.0
    return out
