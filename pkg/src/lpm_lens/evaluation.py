"""Comparing projection-based discovery against full-log discovery.

Ground truth is the ranking discovered on the unprojected log. A projection
method is judged by recall@k and NDCG@k of the ranking it yields, next to
random projection families of the same set sizes, and by its speedup.
"""
from __future__ import annotations

import logging
import math
import os
import random
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Iterable, Sequence

from .discovery import (DiscoveryParams, DiscoveryTimeout, ProjectedRun, Ranking, discover,
                        discover_with_projections)
from .entropy import DEFAULT_ENTROPY_RATIO, discover_entropy_projections
from .eventlog import EventLog
from .family import family_to_json, sort_family
from .markov import MclParams, discover_markov_projections
from .mrig import DEFAULT_MRIG_THRESHOLD, discover_mrig_projections

logger = logging.getLogger(__name__)

DEFAULT_KS = (5, 10, 20)
TIMING_MODES = ("wall", "cpu-sum")


class EvaluationTimeout(RuntimeError):
    def __init__(self, message: str, report: "EvalReport"):
        super().__init__(message)
        self.report = report


def recall_at_k(ideal: Ranking, found: Ranking, k: int) -> float:
    """Share of the ideal top ``k`` models also in the found top ``k``,
    matched by canonical form; the denominator is ``min(k, len(ideal))``."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if not ideal:
        raise ValueError("recall is undefined for an empty ideal ranking")
    want = {m.key for m in ideal[:k]}
    got = {m.key for m in found[:k]}
    return len(want & got) / min(k, len(ideal))


def dcg(relevances: Sequence[float], k: int) -> float:
    return sum((2.0 ** rel - 1.0) / math.log2(i + 2) for i, rel in enumerate(relevances[:k]))


def ndcg_at_k(ideal: Ranking, found: Ranking, k: int) -> float:
    """DCG of the found ranking over DCG of the ideal one, using weighted
    averages as graded relevance.

    A found model can beat the ideal ones when it was pruned from the
    full-log search but not from a projected one; the ratio is then capped at 1.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    idcg = dcg([m.score.weighted_average for m in ideal], k)
    if idcg == 0:
        raise ValueError("IDCG is zero; the ground-truth ranking carries no relevance")
    return min(1.0, dcg([m.score.weighted_average for m in found], k) / idcg)


def random_family(family: Iterable[Iterable[str]], alphabet: Iterable[str], seed: int) -> list[frozenset[str]]:
    """One uniformly random set per member of ``family``, of the same size."""
    rng = random.Random(seed)
    pool = sorted(alphabet)
    out = []
    for q in sort_family(family):
        if len(q) > len(pool):
            raise ValueError("projection set is larger than the alphabet")
        out.append(frozenset(rng.sample(pool, len(q))))
    return out


# projection methods

def projection_method(name: str, **params) -> Callable[[EventLog], list[frozenset[str]]]:
    """``markov`` (MclParams fields), ``entropy`` (``ratio``) or ``mrig`` (``threshold``)."""
    if name == "markov":
        mp = MclParams(**params)
        return lambda log: discover_markov_projections(log, mp)
    if name == "entropy":
        ratio = params.get("ratio", DEFAULT_ENTROPY_RATIO)
        return lambda log: discover_entropy_projections(log, ratio)
    if name == "mrig":
        thr = params.get("threshold", DEFAULT_MRIG_THRESHOLD)
        return lambda log: discover_mrig_projections(log, thr)
    raise ValueError(f"unknown projection method {name!r}")


@dataclass
class Timing:
    wall: float = 0.0
    cpu: float = 0.0

    def get(self, mode: str) -> float:
        return self.wall if mode == "wall" else self.cpu


class _Clock:
    def __enter__(self):
        self.w, self.c = time.perf_counter(), time.process_time()
        self.t = Timing()
        return self.t

    def __exit__(self, *exc):
        self.t.wall = time.perf_counter() - self.w
        self.t.cpu = time.process_time() - self.c
        return False


@dataclass
class EvalReport:
    method: str
    ks: tuple[int, ...] = DEFAULT_KS
    family: list[list[str]] = field(default_factory=list)
    family_sizes: list[int] = field(default_factory=list)
    recall_at_k: dict[int, float] = field(default_factory=dict)
    ndcg_at_k: dict[int, float] = field(default_factory=dict)
    random_baseline: dict[str, dict] = field(default_factory=dict)
    timings: dict[str, dict] = field(default_factory=dict)
    speedup: dict[str, float] = field(default_factory=dict)
    timing_mode: str = "cpu-sum"
    repetitions: int = 0
    seed: int = 0
    ideal: list[dict] = field(default_factory=list)
    found: list[dict] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    partial: bool = False

    def to_json(self) -> dict:
        d = asdict(self)
        d["ks"] = list(self.ks)
        for key in ("recall_at_k", "ndcg_at_k"):
            d[key] = {str(k): v for k, v in getattr(self, key).items()}
        return d

    def csv_row(self) -> dict:
        row = {"method": self.method, "n_sets": len(self.family_sizes),
               "speedup": self.speedup.get(self.timing_mode)}
        for k in self.ks:
            row[f"recall@{k}"] = self.recall_at_k.get(k)
            row[f"ndcg@{k}"] = self.ndcg_at_k.get(k)
            for metric in (f"recall@{k}", f"ndcg@{k}"):
                b = self.random_baseline.get(metric, {})
                row[f"random_{metric}_mean"] = b.get("mean")
                row[f"random_{metric}_se"] = b.get("se")
        return row


def _metrics(ideal: Ranking, found: Ranking, ks) -> tuple[dict, dict]:
    return ({k: recall_at_k(ideal, found, k) for k in ks},
            {k: ndcg_at_k(ideal, found, k) for k in ks})


def _run_projected(log: EventLog, family, params: DiscoveryParams) -> tuple[Ranking, list[float], list[float]]:
    if not family:
        return Ranking(), [], []
    run = ProjectedRun(Ranking(), [], [])
    ranking = discover_with_projections(log, family, params, timings=run)
    return ranking, run.per_projection_seconds, run.per_projection_cpu


def _baseline_rep(args):
    log, family, params, seed = args
    fam = random_family(family, log.activities, seed)
    ranking, _, _ = _run_projected(log, fam, params)
    return ranking


@dataclass
class GroundTruth:
    ranking: Ranking
    timing: Timing


def ground_truth(log: EventLog, params: DiscoveryParams = DiscoveryParams(),
                 timeout: float | None = 600.0) -> GroundTruth:
    """Full-log discovery with its timing; raises DiscoveryTimeout past ``timeout`` seconds."""
    with _Clock() as t:
        deadline = None if timeout is None else time.monotonic() + timeout
        ranking = discover(log, params, deadline=deadline)
    return GroundTruth(ranking, t)


def evaluate(log: EventLog, method: str | Callable[[EventLog], list], params: DiscoveryParams = DiscoveryParams(),
             repetitions: int = 10, seed: int = 0, ks: Sequence[int] = DEFAULT_KS,
             timing_mode: str = "cpu-sum", threads: int | None = 1, method_params: dict | None = None,
             ground_truth_timeout: float | None = 600.0, truth: GroundTruth | None = None) -> EvalReport:
    """Run the full evaluation protocol for one projection method.

    ``speedup`` is full-log discovery time over projection-set discovery
    time plus the summed projected discovery times, reported for both wall
    and CPU clocks; ``timing_mode`` selects the headline figure. Pass
    ``truth`` to reuse one ground-truth run across several methods; it must
    come from the same log and params.
    """
    if timing_mode not in TIMING_MODES:
        raise ValueError(f"timing_mode must be one of {TIMING_MODES}")
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    name = method if isinstance(method, str) else getattr(method, "__name__", "custom")
    find_sets = projection_method(method, **(method_params or {})) if isinstance(method, str) else method
    report = EvalReport(method=name, ks=tuple(ks), timing_mode=timing_mode, repetitions=repetitions, seed=seed)

    if truth is None:
        try:
            truth = ground_truth(log, params, ground_truth_timeout)
        except DiscoveryTimeout as exc:
            report.partial = True
            report.ideal = exc.partial.to_json()
            report.warnings.append(f"ground-truth discovery exceeded {ground_truth_timeout} s")
            raise EvaluationTimeout("ground-truth discovery timed out", report) from exc
    ideal, t_full = truth.ranking, truth.timing
    report.timings["full_discovery"] = asdict(t_full)
    report.ideal = ideal.to_json()
    if not ideal:
        raise ValueError("ground-truth ranking is empty; lower the pruning thresholds")

    with _Clock() as t_sets:
        family = sort_family(find_sets(log))
    report.family = family_to_json(family)
    report.family_sizes = [len(q) for q in family]
    if not family:
        report.warnings.append("projection method returned no projection sets")

    with _Clock() as t_proj:
        found, walls, cpus = _run_projected(log, family, params)
    report.found = found.to_json()
    report.recall_at_k, report.ndcg_at_k = _metrics(ideal, found, ks)

    seeds = [random.Random(seed).randrange(2 ** 31) + r for r in range(repetitions)]
    jobs = [(log, family, params, s) for s in seeds]
    n_workers = min(threads or os.cpu_count() or 1, repetitions)
    if n_workers > 1:
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            rankings = list(pool.map(_baseline_rep, jobs))
    else:
        rankings = [_baseline_rep(j) for j in jobs]
    per_metric: dict[str, list[float]] = {}
    for ranking in rankings:
        rec, nd = _metrics(ideal, ranking, ks)
        for k in ks:
            per_metric.setdefault(f"recall@{k}", []).append(rec[k])
            per_metric.setdefault(f"ndcg@{k}", []).append(nd[k])
    if repetitions == 1:
        report.warnings.append("a single repetition gives no standard error; reported as 0")
    for metric, vals in per_metric.items():
        se = statistics.stdev(vals) / math.sqrt(len(vals)) if len(vals) > 1 else 0.0
        report.random_baseline[metric] = {"mean": statistics.fmean(vals), "se": se, "values": vals}

    report.timings["projection_set_discovery"] = asdict(t_sets)
    report.timings["projected_discovery"] = {"wall": sum(walls), "cpu": sum(cpus),
                                             "per_projection_wall": walls, "per_projection_cpu": cpus,
                                             "elapsed_wall": t_proj.wall}
    for mode, key in (("wall", "wall"), ("cpu-sum", "cpu")):
        denom = getattr(t_sets, key) + sum(walls if key == "wall" else cpus)
        report.speedup[mode] = t_full.get(mode) / denom if denom > 0 else math.inf
    return report
