"""
Causality through intermediaries
================================

Two bundled scenarios where the question is not who touched the cell, but
whether the news of one access reached the other.
"""

from dsmrace import EventKind, load_golden, run

# %%
# A chain.  P1 reads from P0, then writes to P2; P2 then writes back into
# P0's window.  P0's cell is touched twice, but the second access carries
# a clock that already covers the first, so nothing is reported.
trace = run(load_golden("fig5b"))
for e in trace.events:
    if e.kind.ticks:
        print(f"{e.id:2d} P{e.process} {e.kind.value:12s} {e.clock_post}")
print("races:", len(trace.races))

# %%
# Four processes.  P0 writes to P1, then to P2; P2 forwards to P3; P3
# writes into P1.  P3's clock has heard of P0's second write, but P0's first
# write reached P1 through no channel P3 ever saw.
trace = run(load_golden("fig5c"))
for e in trace.events:
    if e.kind is EventKind.PUT_APPLY:
        print(f"{e.op} arrives at P{e.process} with {e.clock_post}")
for r in trace.races:
    print(r.describe())

# %%
# A delayed put.  P1's get holds the cell from request until the reply
# lands, so P0's put queues behind it and applies afterwards.
trace = run(load_golden("fig4"))
for e in trace.events:
    print(f"{e.id:2d} {e.op} {e.kind.value}")
print("final:", trace.final_values["P2.pub[0]"])
