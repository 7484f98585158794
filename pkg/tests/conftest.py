import random

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from lpm_lens.eventlog import EventLog
from lpm_lens.tree import LOOP, Leaf, Op

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ACTS = "abcde"


def traces(alphabet=ACTS, max_len=8):
    return st.lists(st.sampled_from(alphabet), max_size=max_len).map(tuple)


def logs(alphabet=ACTS, max_traces=8, max_len=8, min_events=0):
    def build(ts):
        return EventLog(ts)
    s = st.lists(traces(alphabet, max_len), min_size=1, max_size=max_traces).map(build)
    if min_events:
        s = s.filter(lambda log: log.n_events >= min_events)
    return s


@st.composite
def trees(draw, alphabet=ACTS, max_leaves=4):
    """Random process trees over distinct leaves; loops only around leaves,
    matching the discovery grammar."""
    k = draw(st.integers(1, min(max_leaves, len(alphabet))))
    acts = draw(st.permutations(list(alphabet)))[:k]

    def build(part):
        if len(part) == 1:
            leaf = Leaf(part[0])
            return Op(LOOP, (leaf,)) if draw(st.booleans()) else leaf
        cut = draw(st.integers(1, len(part) - 1))
        op = draw(st.sampled_from(("seq", "xor", "and")))
        return Op(op, (build(part[:cut]), build(part[cut:])))

    return build(acts)


def random_log(rng: random.Random, alphabet: str, n_traces: int, max_len: int) -> EventLog:
    return EventLog([tuple(rng.choice(alphabet) for _ in range(rng.randint(0, max_len)))
                     for _ in range(n_traces)])


@pytest.fixture
def abc_bac_log():
    # two orderings of the same three activities, as in the preliminaries example
    return EventLog({("a", "b", "c"): 2, ("b", "a", "c"): 3})


@pytest.fixture
def projection_log():
    return EventLog({tuple("abcabc"): 3, tuple("acadc"): 2, tuple("acdc"): 4})
