"""
Three ways to pick projection sets
==================================

A synthetic log interleaves three planted four-activity patterns with
noise. Each heuristic proposes activity sets on which a model search could
run instead of the whole log.
"""

from lpm_lens import planted_log
from lpm_lens.entropy import discover_entropy_projections
from lpm_lens.markov import MclParams, discover_markov_projections
from lpm_lens.mrig import MrigTrace, discover_mrig_projections

log = planted_log(seed=0)
print(log.n_traces, "traces,", log.n_events, "events over", len(log.activities), "activities")

# Markov clustering of the connectedness graph. The lazy-walk option adds
# self-mass so that directed chains do not make the iteration oscillate.
for params in (MclParams(), MclParams(inflation=2.5, self_loop=0.5)):
    family = discover_markov_projections(log, params)
    print("markov", params.inflation, params.self_loop, [sorted(s) for s in family])

# Sets grown one activity at a time while their projected entropy stays
# below a share of the full log's entropy. Larger ratios admit more sets.
for r in (0.05, 0.1, 0.15):
    family = discover_entropy_projections(log, r)
    print(f"entropy r={r}: {len(family)} sets, sizes {sorted({len(s) for s in family})}")

# Growth driven by information gain; the trace records why each set was kept.
trace = MrigTrace()
family = discover_mrig_projections(log, 0.1, trace=trace)
print("mrig:", [sorted(s) for s in family])
for grown, base, gain in trace.chain(family[0]):
    print("  ", sorted(grown), "from", sorted(base) if base else "adjacent pair", gain)
