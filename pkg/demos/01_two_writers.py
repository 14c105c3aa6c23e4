"""
Two writers, one cell
=====================

P0 and P2 both put into a public cell owned by P1, with nothing ordering
the two writes.  The second write arrives carrying a clock that is
incomparable with the one the first write left on the cell, so it is
reported.  Execution carries on and the second value wins.
"""

from dsmrace import Address, Memory, RdmaEngine, Space

# %%
# Three processes.  Public cells live in the owner's window, private cells
# are the local buffers puts read from.
mem = Memory(3)
cell = Address(1, Space.PUBLIC, 0)
mem.define_cell(cell, 0)
mem.define_cell(Address(0, Space.PRIVATE, 0), 10)
mem.define_cell(Address(2, Space.PRIVATE, 0), 20)
engine = RdmaEngine(mem)

# %%
# First write: no earlier access, no report.
print(engine.put(0, Address(0, Space.PRIVATE, 0), cell))
print("cell clock after first write:", mem.cell(cell).v_clock)

# %%
# Second write from P2, which never heard from P0 or P1.
for race in engine.put(2, Address(2, Space.PRIVATE, 0), cell):
    print(race.describe())
print("final value:", mem.cell(cell).value)

# %%
# P0 now reads the cell back.  Its clock knows its own write but not P2's,
# so the read is unordered with the last write and is reported too.  A read
# is only checked against the write clock W, which gets never move.
value, races = engine.get(0, cell, Address(0, Space.PRIVATE, 0))
print("P0 read", value, "races:", [r.kind_conflict for r in races])
print("V =", mem.cell(cell).v_clock, " W =", mem.cell(cell).w_clock)
