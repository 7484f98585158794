"""
Event logs, projections and log statistics
==========================================

A small tour of the data layer: build a log, project it onto a few
activities, and look at the directly-follows and directly-precedes ratios
that the projection heuristics are built on.
"""

import numpy as np

from lpm_lens import EventLog, project_log
from lpm_lens.stats import connectedness_matrix, dfr_matrix, dpr_matrix, projected_entropy, total_entropy

# a log is a multiset of traces; a dict gives each distinct trace its multiplicity
log = EventLog({tuple("abcabc"): 3, tuple("acadc"): 2, tuple("acdc"): 4})
print(log)
print("traces:", log.n_traces, " events:", log.n_events, " activities:", log.activities)

# projection drops every event outside the chosen set and merges equal traces
print(project_log(log, {"a", "c"}))

# row i of the dfr matrix says how often activity i is directly followed by each other activity
np.set_printoptions(precision=3, suppress=True)
print("dfr\n", dfr_matrix(log))
print("dpr\n", dpr_matrix(log))

# rows do not sum to one: the missing mass is the share of occurrences at the end
# (dfr) or start (dpr) of a trace
print("dfr row sums", dfr_matrix(log).sum(axis=1))

# connectedness mixes both ratios into one weighted graph for clustering
print("connectedness\n", connectedness_matrix(log))

# entropy of the statistics: low when the projected behaviour is predictable
print("Ent(L) =", round(total_entropy(log), 4))
for acts in ({"a", "c"}, {"a", "b", "c"}, {"a", "d"}):
    print(sorted(acts), round(projected_entropy(log, acts), 4))
