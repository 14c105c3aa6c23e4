"""
Checking the detector against happens-before
============================================

The detector decides everything from clocks.  The oracle decides from the
trace's structure alone: program order, messages, and which write a read
observed.  Here we build the oracle's graph for one trace, look at its
reachability matrix, and then compare the two over a batch of random
scenarios and schedules.
"""

import random

import numpy as np

from dsmrace import build_hb_graph, check_trace, load_golden, run
from dsmrace.generate import random_scenario

# %%
# The reachability matrix is a plain boolean array over clock events.
trace = run(load_golden("fig5a"))
g = build_hb_graph(trace)
print("nodes:", g.nodes)
print(g.reach.astype(int))
print("edges:", sorted(g.edges))

# %%
# Every pair of clock events: clock order must be strict exactly when the
# graph has a path.
report = check_trace(trace)
print("agree:", report.agree, "racy cells:", sorted(map(str, report.oracle_cells)))

# %%
# A batch of random programs.  Nothing here is tuned; divergences would be
# printed as they appear.
rng = random.Random(2024)
verdicts = []
for _ in range(300):
    rep = check_trace(run(random_scenario(rng)))
    if not rep.agree:
        print(rep.diff())
    verdicts.append((rep.agree, bool(rep.oracle_cells)))
v = np.array(verdicts)
print(f"{v[:, 0].sum()} of {len(v)} agree; {v[:, 1].sum()} contain a race")
