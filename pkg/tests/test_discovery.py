import logging
import random

import pytest
from hypothesis import given, settings

import oracles
from conftest import logs, random_log
from lpm_lens.discovery import (DiscoveryParams, DiscoveryTimeout, ProjectedRun, RankedModel, Ranking,
                                SearchStats, discover, discover_with_projections, expansions, seed_trees)
from lpm_lens.eventlog import EventLog, project_log
from lpm_lens.quality import Scorer, score
from lpm_lens.tree import canonical_form, seq

small = logs(alphabet="abcd", max_traces=6, max_len=7).filter(lambda log: len(log.activities) >= 2)


def exhaustive(log, params):
    scorer = Scorer(log, params.weights, params.max_len)
    trees = oracles.all_trees(log.activities, params.max_activities)
    return Ranking.build([RankedModel(t, scorer(t)) for t in trees.values()], params.top_k)


def test_seed_and_expansion_counts():
    seeds = list(seed_trees("ab"))
    # seq both ways, xor and and once, each leaf looped or not
    assert len(seeds) == 4 * 4
    assert len({canonical_form(t) for t in seeds}) == 16
    ext = {canonical_form(t) for t in expansions(seq("a", "b"), "abc")}
    assert "seq(a,b,c)" in ext and "seq(xor(a,c),b)" in ext and "seq(a,loop(c),b)" in ext
    assert all(len(t.leaves) == 3 for t in expansions(seq("a", "b"), "abc"))


def test_pair_log_top_model():
    ranking = discover(EventLog({("a", "b"): 10}), DiscoveryParams(top_k=1))
    top = ranking[0]
    assert top.key == "seq(a,b)"
    assert (top.score.confidence, top.score.coverage, top.score.language_fit) == (1, 1, 1)


def test_full_support_prune_empties_ranking():
    assert discover(EventLog({tuple("abc"): 5}), DiscoveryParams(support_prune=1.0)) == []


def test_full_support_reachable_by_choice_on_two_activity_log():
    # xor(a,b) fits every event on its own, so c equals the number of events
    keys = discover(EventLog({("a", "b"): 10}), DiscoveryParams(support_prune=1.0)).keys()
    assert keys and all(k.startswith("xor") for k in keys)


def test_determinism_prune():
    ranking = discover(EventLog({tuple("abc"): 5, tuple("acb"): 2}), DiscoveryParams(determinism_prune=1.0))
    assert ranking and all(m.score.determinism == 1 for m in ranking)


def test_fewer_than_two_activities(caplog):
    with caplog.at_level(logging.WARNING, logger="lpm_lens.discovery"):
        assert discover(EventLog({("a", "a"): 3})) == []
    assert "fewer than two" in caplog.text


@pytest.mark.parametrize("kw", [{"top_k": 0}, {"support_prune": 1.5}, {"determinism_prune": -0.1},
                                {"max_activities": 1}, {"weights": (1, 0, 0, 0)}])
def test_param_validation(kw):
    with pytest.raises(ValueError):
        DiscoveryParams(**kw)


@settings(max_examples=25)
@given(small)
def test_matches_exhaustive_enumeration(log):
    params = DiscoveryParams(top_k=15, max_activities=3)
    stats = SearchStats()
    got, ref = discover(log, params, stats=stats), exhaustive(log, params)
    assert got.keys() == ref.keys()
    assert [m.score for m in got] == [m.score for m in ref]
    assert stats.candidates == set(oracles.all_trees(log.activities, 3))


def test_scores_agree_with_definitions_on_top_models():
    log = EventLog({tuple("abcab"): 3, tuple("acb"): 2, tuple("bca"): 1})
    for m in discover(log, DiscoveryParams(top_k=10, max_activities=3)):
        values, wavg = oracles.score(m.tree, log)
        assert m.score.values() == pytest.approx(values) and m.score.weighted_average == pytest.approx(wavg)


@settings(max_examples=8)
@given(small)
def test_ranking_invariants(log):
    ranking = discover(log, DiscoveryParams(top_k=7, max_activities=3))
    keys = ranking.keys()
    assert len(keys) == len(set(keys)) <= 7
    order = [(-m.score.weighted_average, m.key) for m in ranking]
    assert order == sorted(order)
    assert discover(log, DiscoveryParams(top_k=7, max_activities=3)) == ranking


@settings(max_examples=8)
@given(small)
def test_full_projection_is_identity(log):
    params = DiscoveryParams(top_k=10, max_activities=3)
    assert discover(project_log(log, log.alphabet), params) == discover(log, params)
    assert discover_with_projections(log, [log.alphabet], params) == discover(log, params)


def test_rescoring_uses_full_log():
    log = EventLog({tuple("abcd"): 4, tuple("abd"): 3, tuple("cd"): 2})
    params = DiscoveryParams(top_k=10, max_activities=3)
    ranking = discover_with_projections(log, [{"a", "b"}, {"b", "c", "d"}], params)
    for m in ranking:
        assert m.score == score(m.tree, log)
        assert set(m.tree.leaves) <= {"a", "b"} or set(m.tree.leaves) <= {"b", "c", "d"}


def test_models_outside_projection_are_unreachable():
    log = EventLog({tuple("abc"): 6})
    keys = discover_with_projections(log, [{"a", "b"}], DiscoveryParams(top_k=50)).keys()
    assert keys and all("c" not in k for k in keys)


def test_disjoint_projections_recover_both_patterns():
    rng = random.Random(3)
    traces = []
    for _ in range(30):
        parts = [["a", "b"], ["x", "y"]]
        rng.shuffle(parts)
        traces.append(tuple(parts[0] + parts[1]))
    log = EventLog(traces)
    ranking = discover_with_projections(log, [{"a", "b"}, {"x", "y"}], DiscoveryParams(top_k=4))
    assert {"seq(a,b)", "seq(x,y)"} <= set(ranking.keys())


def test_projection_soundness_on_nested_sets():
    rng = random.Random(11)
    for _ in range(6):
        log = random_log(rng, "abcde", 8, 8)
        inner, outer = {"a", "b", "c"}, {"a", "b", "c", "d"}
        seen = []
        for q in (inner, outer):
            st = SearchStats()
            discover(project_log(log, q), DiscoveryParams(max_activities=3), stats=st)
            seen.append(st.candidates)
        assert seen[0] <= seen[1]


def test_projected_run_records_timings():
    log = EventLog({tuple("abc"): 3})
    run = ProjectedRun(Ranking(), [], [])
    discover_with_projections(log, [{"a", "b"}, {"b", "c"}], DiscoveryParams(), timings=run)
    assert len(run.per_projection_seconds) == len(run.per_projection_cpu) == 2
    assert run.ranking.keys()


def test_empty_family_rejected():
    with pytest.raises(ValueError):
        discover_with_projections(EventLog([("a", "b")]), [])


def test_timeout_carries_partial_ranking():
    log = random_log(random.Random(0), "abcde", 20, 10)
    with pytest.raises(DiscoveryTimeout) as info:
        discover(log, DiscoveryParams(timeout=0.0))
    assert isinstance(info.value.partial, Ranking)


def test_ranking_keeps_best_duplicate():
    log = EventLog({("a", "b"): 2})
    good = RankedModel(seq("a", "b"), score(seq("a", "b"), log))
    worse = RankedModel(seq("a", "b"), score(seq("a", "b"), EventLog({("a", "b"): 1, ("b",): 5})))
    assert Ranking.build([worse, good]) == [good]
    assert Ranking.build([good]).to_json()[0]["model"] == "seq(a,b)"
