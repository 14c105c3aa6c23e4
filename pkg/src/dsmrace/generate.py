"""Random small scenarios for property checks."""

from __future__ import annotations

import random

from .memory import Address, Space
from .sim import Scenario, SeededSchedule, Statement


def random_scenario(
    rng: random.Random,
    max_processes: int = 4,
    max_statements: int = 12,
    read_only: bool = False,
    min_processes: int = 2,
) -> Scenario:
    """Draw a valid scenario with a seeded schedule.

    Public cells are few (one to three across the whole system) so that
    accesses collide often.  With ``read_only`` every remote operation is a
    get.
    """
    n = rng.randint(min_processes, max_processes)
    cells: list[tuple[Address, int]] = []
    public = []
    for _ in range(rng.randint(1, 3)):
        p = rng.randrange(n)
        addr = Address(p, Space.PUBLIC, sum(1 for a in public if a.process == p))
        public.append(addr)
    for a in public:
        cells.append((a, rng.randrange(100)))
    privates = {p: [Address(p, Space.PRIVATE, k) for k in range(rng.randint(1, 2))] for p in range(n)}
    for p in range(n):
        for a in privates[p]:
            cells.append((a, 100 * (p + 1) + a.offset))

    total = rng.randint(1, max_statements)
    programs: list[list[Statement]] = [[] for _ in range(n)]
    for _ in range(total):
        p = rng.randrange(n)
        r = rng.random()
        if r < 0.15:
            st = Statement("compute")
        elif read_only or r < 0.55:
            st = Statement("get", rng.choice(public), rng.choice(privates[p]))
        else:
            st = Statement("put", rng.choice(privates[p]), rng.choice(public))
        programs[p].append(st)

    return Scenario(
        n=n,
        cells=tuple(cells),
        programs=tuple(tuple(prog) for prog in programs),
        schedule=SeededSchedule(rng.getrandbits(32)),
        name="random",
    )
