import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from conftest import logs
from lpm_lens.eventlog import EventLog, project_log
from lpm_lens.stats import (connectedness_matrix, dfr, dfr_matrix, dpr, dpr_matrix, entropy, projected_entropy,
                            row_normalize, statistic_entropies, total_entropy)


def test_dfr_hand_counts(abc_bac_log):
    assert dfr("a", "b", abc_bac_log) == pytest.approx(2 / 5)
    assert dfr("a", "c", abc_bac_log) == pytest.approx(3 / 5)
    assert dfr("a", "a", EventLog([("a",)])) == 0


def test_dpr_hand_counts(abc_bac_log):
    assert dpr("a", "b", abc_bac_log) == pytest.approx(3 / 5)
    # c follows a in the two <a,b,c> traces and b in the three <b,a,c> ones
    assert dpr("c", "a", abc_bac_log) == pytest.approx(3 / 5)
    assert dpr("c", "b", abc_bac_log) == pytest.approx(2 / 5)
    assert dpr("a", "b", EventLog([("a", "b")])) == 0


def test_absent_activity_gives_zero(abc_bac_log):
    assert dfr("z", "a", abc_bac_log) == 0 and dpr("a", "z", abc_bac_log) == 0


@given(logs())
def test_matrices_match_oracle(log):
    acts = log.activities
    F, P = dfr_matrix(log), dpr_matrix(log)
    for i, a in enumerate(acts):
        for j, b in enumerate(acts):
            assert F[i, j] == pytest.approx(oracles.dfr(log, a, b))
            assert P[i, j] == pytest.approx(oracles.dpr(log, a, b))


@given(logs())
def test_row_sums_bounded_by_boundaries(log):
    F, P = dfr_matrix(log), dpr_matrix(log)
    last = {t[-1] for t in log if t}
    first = {t[0] for t in log if t}
    for i, a in enumerate(log.activities):
        assert F[i].sum() <= 1 + 1e-12 and P[i].sum() <= 1 + 1e-12
        assert (F[i].sum() < 1 - 1e-12) == (a in last)
        assert (P[i].sum() < 1 - 1e-12) == (a in first)


@given(logs())
def test_dfr_dpr_duality(log):
    for a in log.activities:
        for b in log.activities:
            assert dfr(a, b, log) * log.count(a) == pytest.approx(dpr(b, a, log) * log.count(b))


# entropy

@pytest.mark.parametrize("x, h", [
    ([0.25] * 4, 2.0), ([1.0], 0.0), ([1, 0, 0], 0.0), ([0.5, 0.25, 0.25], 1.5), ([], 0.0),
])
def test_entropy_values(x, h):
    assert entropy(x) == pytest.approx(h)


@pytest.mark.parametrize("n", [2, 4, 8])
def test_entropy_uniform(n):
    assert abs(entropy([1 / n] * n) - math.log2(n)) < 1e-9


def test_entropy_rejects_negative():
    with pytest.raises(ValueError):
        entropy([0.5, -0.1])


@given(st.lists(st.floats(0, 1, allow_nan=False), max_size=8), st.randoms())
def test_entropy_permutation_invariant(xs, rnd):
    ys = list(xs)
    rnd.shuffle(ys)
    assert entropy(xs) == pytest.approx(entropy(ys))
    assert entropy(xs) >= 0


@given(st.lists(st.floats(0, 1, allow_nan=False), max_size=8))
def test_entropy_zero_iff_entries_are_zero_or_one(xs):
    # the vectors are not renormalized, so a lone 0.5 still carries entropy
    assert (entropy(xs) == 0) == all(x in (0.0, 1.0) for x in xs)


@given(st.lists(st.floats(0.01, 1), min_size=1, max_size=6))
def test_entropy_of_distribution_zero_iff_point_mass(ws):
    p = [w / sum(ws) for w in ws]
    assert (entropy(p) < 1e-12) == (len(ws) == 1)


def test_total_entropy_examples():
    assert total_entropy(EventLog({("a", "b"): 7})) == 0
    assert total_entropy(EventLog([("a", "b"), ("a", "c")])) == pytest.approx(1.0)


@given(logs(), st.sampled_from("abcde"))
def test_single_activity_projection_entropy_comes_from_repeats(log, a):
    # on L|{a} both statistics of a are the scalar r = #(a,a) / #a
    proj = project_log(log, {a})
    n = proj.count(a)
    r = sum(1 for t in proj for _ in zip(t, t[1:])) / n if n else 0.0
    assert projected_entropy(log, {a}) == pytest.approx(2 * oracles.H([r]))


def test_single_activity_with_direct_repeat_is_not_zero():
    # <a,a>: dfr(a,a) = 1/2 and dpr(a,a) = 1/2, each contributing 0.5 bit
    assert projected_entropy(EventLog([("a", "a")]), {"a"}) == pytest.approx(1.0)


@given(logs())
def test_total_entropy_matches_oracle(log):
    assert total_entropy(log) == pytest.approx(oracles.total_entropy(log))
    hf, hp = statistic_entropies(log)
    assert hf.shape == hp.shape == (len(log.activities),)


@given(logs(alphabet="abcd"))
def test_projected_entropy_ignores_outside_activities(log):
    # adding an unrelated activity and projecting it away changes nothing
    noisy = EventLog({t + ("z",): m for t, m in log.items()})
    acts = {"a", "b", "c"}
    assert projected_entropy(noisy, acts) == pytest.approx(total_entropy(project_log(log, acts)))


# connectedness and normalization

def test_connectedness_orientation():
    # both terms of M[i][j] count j directly before i
    M = connectedness_matrix(EventLog({("a", "b"): 4}))
    assert M[0, 1] == 0
    assert M[1, 0] == pytest.approx(math.sqrt(2))


@given(logs(min_events=1))
def test_connectedness_matches_oracle(log):
    M = connectedness_matrix(log)
    ref = oracles.connectedness(log, log.activities)
    assert np.allclose(M, ref)
    assert np.all(M >= 0) and np.all(M <= math.sqrt(2) + 1e-12)


def test_never_adjacent_is_zero():
    M = connectedness_matrix(EventLog([("a", "b"), ("c",)]))
    assert M[0, 2] == M[2, 0] == 0


def test_row_normalize():
    out = row_normalize(np.array([[1.0, 1.0, 2.0], [0, 0, 0], [0.5, 0.25, 0.25]]))
    assert np.allclose(out, [[0.25, 0.25, 0.5], [0, 1, 0], [0.5, 0.25, 0.25]])


@given(logs(min_events=1))
def test_row_normalize_is_stochastic(log):
    P = row_normalize(connectedness_matrix(log))
    assert np.allclose(P.sum(axis=1), 1.0, atol=1e-9)


def test_connectedness_needs_activities():
    with pytest.raises(ValueError):
        connectedness_matrix(EventLog([()]))
