"""Deterministic scheduler for put/get/compute programs.

A scenario gives every process a straight-line program.  The scheduler picks
one process per step and advances that process's current statement by one
phase:

========  =======================================================
compute   one step
put       step 1: put-send;  step 2: put-apply (may wait on dst)
get       step 1: get-request + get-serve (may wait on src);
          step 2: get-reply
========  =======================================================

A step into a locked cell emits ``lock-wait`` and leaves the statement where
it was; the process is not runnable until the holder's unlock hands it the
lock (``lock-grant``).  Each process runs one statement at a time, so a get
blocks its initiator from request to reply.

Schedules are either an explicit list of process indices, one per step, or a
seed.  Seeded runs draw uniformly among runnable processes with SplitMix64,
so a seed gives the same interleaving on every platform.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Any, Sequence

from .clock import VectorClock
from .memory import Address, Memory, ScenarioError, StructuralError
from .rdma import GetReply, PutMessage, RdmaEngine, check_get_args, check_put_args
from .trace import Event, EventKind, Trace

OPS = ("put", "get", "compute")
PHASES = {"put": 2, "get": 2, "compute": 1}
MASK64 = (1 << 64) - 1


class ScheduleError(RuntimeError):
    """An explicit schedule picked a process that cannot move."""


class SplitMix64:
    """SplitMix64 with the reference constants."""

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def below(self, k: int) -> int:
        """Uniform integer in ``[0, k)``; rejection sampling, no modulo bias."""
        if k <= 0:
            raise ValueError("k must be positive")
        limit = (1 << 64) - ((1 << 64) % k)
        while True:
            x = self.next_u64()
            if x < limit:
                return x % k


@dataclass(frozen=True)
class Statement:
    op: str
    src: Address | None = None
    dst: Address | None = None

    def __str__(self) -> str:
        if self.op == "compute":
            return "compute"
        return f"{self.op} {self.src} -> {self.dst}"

    def to_dict(self) -> dict[str, Any]:
        d: dict[str, Any] = {"op": self.op}
        if self.src is not None:
            d["src"] = str(self.src)
        if self.dst is not None:
            d["dst"] = str(self.dst)
        return d


@dataclass(frozen=True)
class ExplicitSchedule:
    order: tuple[int, ...]


@dataclass(frozen=True)
class SeededSchedule:
    seed: int


Schedule = ExplicitSchedule | SeededSchedule


@dataclass(frozen=True)
class Scenario:
    n: int
    cells: tuple[tuple[Address, Any], ...]
    programs: tuple[tuple[Statement, ...], ...]
    schedule: Schedule = field(default_factory=lambda: SeededSchedule(0))
    name: str = ""

    def with_schedule(self, schedule: Schedule) -> Scenario:
        return Scenario(self.n, self.cells, self.programs, schedule, self.name)

    def statement_count(self) -> int:
        return sum(len(p) for p in self.programs)

    def to_dict(self) -> dict[str, Any]:
        if isinstance(self.schedule, ExplicitSchedule):
            sched: dict[str, Any] = {"explicit": list(self.schedule.order)}
        else:
            sched = {"seed": self.schedule.seed}
        return {
            "format": 1,
            "name": self.name,
            "processes": self.n,
            "cells": [
                {"process": a.process, "space": a.space.value, "offset": a.offset, "value": v}
                for a, v in self.cells
            ],
            "programs": {str(i): [s.to_dict() for s in prog] for i, prog in enumerate(self.programs)},
            "schedule": sched,
        }

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


def _static_violations(s: Scenario) -> list[str]:
    out: list[str] = []
    if s.n < 1:
        return [f"process count must be >= 1, got {s.n}"]
    if len(s.programs) != s.n:
        out.append(f"{len(s.programs)} programs given for {s.n} processes")
    declared: set[Address] = set()
    for addr, _ in s.cells:
        if not 0 <= addr.process < s.n:
            out.append(f"cell {addr}: process out of range")
        elif addr.offset < 0:
            out.append(f"cell {addr}: negative offset")
        elif addr in declared:
            out.append(f"cell {addr} declared twice")
        declared.add(addr)
    for p, prog in enumerate(s.programs):
        for k, st in enumerate(prog):
            where = f"P{p} statement {k} ({st})"
            if st.op not in OPS:
                out.append(f"{where}: unknown op {st.op!r}")
                continue
            if st.op == "compute":
                if st.src is not None or st.dst is not None:
                    out.append(f"{where}: compute takes no addresses")
                continue
            if st.src is None or st.dst is None:
                out.append(f"{where}: {st.op} needs src and dst")
                continue
            for a in (st.src, st.dst):
                if a not in declared:
                    out.append(f"{where}: {a} is not declared")
            try:
                (check_put_args if st.op == "put" else check_get_args)(p, st.src, st.dst)
            except ScenarioError as exc:
                out.append(f"{where}: {exc}")
    sched = s.schedule
    if isinstance(sched, ExplicitSchedule):
        total = s.statement_count()
        if len(sched.order) < total:
            out.append(f"explicit schedule has {len(sched.order)} steps, fewer than the {total} statements")
        for i, p in enumerate(sched.order):
            if not isinstance(p, int) or not 0 <= p < s.n:
                out.append(f"schedule step {i}: {p!r} is not a process index")
        if not out:
            for p, prog in enumerate(s.programs):
                need = sum(PHASES[st.op] for st in prog)
                have = sched.order.count(p)
                if have < need:
                    out.append(f"schedule gives P{p} {have} steps; its program needs at least {need}")
    elif isinstance(sched, SeededSchedule):
        if not isinstance(sched.seed, int) or not 0 <= sched.seed <= MASK64:
            out.append(f"seed must be an unsigned 64-bit integer, got {sched.seed!r}")
    else:
        out.append(f"unknown schedule {sched!r}")
    return out


def validate(s: Scenario) -> list[str]:
    """Return every violation found; an empty list means the scenario can run.

    Explicit schedules are also dry-run, since whether a step lands on a
    blocked process depends on lock contention.
    """
    out = _static_violations(s)
    if out or not isinstance(s.schedule, ExplicitSchedule):
        return out
    sim = Simulator(s, detect=False)
    try:
        for i, p in enumerate(s.schedule.order):
            sim.step(p, where=f"schedule step {i}")
    except ScheduleError as exc:
        return [str(exc)]
    if not sim.done:
        left = ", ".join(f"P{p}" for p in range(s.n) if not sim.finished(p))
        out.append(f"explicit schedule ends before {left} finish")
    return out


@dataclass
class _Cursor:
    pc: int = 0
    phase: int = 0
    blocked: bool = False
    pending: PutMessage | GetReply | None = None


class Simulator:
    """Single-threaded event loop over one scenario.

    ``step(p)`` advances process ``p`` by one scheduler event and returns the
    trace events that step produced; :func:`run` is a fold over it.
    """

    def __init__(self, scenario: Scenario, detect: bool = True):
        self.scenario = scenario
        self.memory = Memory(scenario.n)
        for addr, value in scenario.cells:
            self.memory.define_cell(addr, value)
        self.memory.frozen = True
        self.engine = RdmaEngine(self.memory, detect=detect)
        self.cursors = [_Cursor() for _ in range(scenario.n)]

    @property
    def events(self) -> list[Event]:
        return self.engine.log

    def finished(self, p: int) -> bool:
        return self.cursors[p].pc >= len(self.scenario.programs[p])

    @property
    def done(self) -> bool:
        return all(self.finished(p) for p in range(self.scenario.n))

    def runnable(self) -> list[int]:
        return [p for p in range(self.scenario.n) if not self.finished(p) and not self.cursors[p].blocked]

    def clock(self, p: int) -> VectorClock:
        return self.engine.clock_of(p)

    def step(self, p: int, where: str = "") -> list[Event]:
        at = f"{where}: " if where else ""
        if not 0 <= p < self.scenario.n:
            raise ScheduleError(f"{at}no process P{p}")
        if self.finished(p):
            raise ScheduleError(f"{at}P{p} has no statements left")
        cur = self.cursors[p]
        if cur.blocked:
            raise ScheduleError(f"{at}P{p} is waiting for a lock")
        st = self.scenario.programs[p][cur.pc]
        op = f"P{p}:{cur.pc}"
        eng = self.engine

        if st.op == "compute":
            events = eng.compute(op, p)
            self._advance(cur)
        elif st.op == "put" and cur.phase == 0:
            events, cur.pending = eng.put_send(op, p, st.src, st.dst)
            cur.phase = 1
        elif st.op == "put":
            ok, events = eng.acquire(op, p, st.dst)
            if not ok:
                cur.blocked = True
                return events
            assert isinstance(cur.pending, PutMessage)
            events = eng.put_apply(op, p, st.src, st.dst, cur.pending)
            self._advance(cur)
        elif cur.phase == 0:
            for addr in (st.dst, st.src):
                ok, events = eng.acquire(op, p, addr)
                if not ok:
                    cur.blocked = True
                    return events
            events, cur.pending = eng.get_request(op, p, st.src, st.dst)
            cur.phase = 1
        else:
            assert isinstance(cur.pending, GetReply)
            events = eng.get_reply(op, p, st.src, st.dst, cur.pending)
            self._advance(cur)

        for e in events:
            if e.kind is EventKind.LOCK_GRANT:
                waiter = self.cursors[e.initiator]
                if not waiter.blocked:
                    raise StructuralError(f"lock granted to P{e.initiator}, which was not waiting")
                waiter.blocked = False
        return events

    @staticmethod
    def _advance(cur: _Cursor) -> None:
        cur.pc += 1
        cur.phase = 0
        cur.pending = None

    def trace(self) -> Trace:
        return Trace(
            scenario_hash=self.scenario.digest(),
            n=self.scenario.n,
            events=list(self.events),
            final_values=self.memory.snapshot_values(),
            detect=self.engine.detect,
        )


def run(scenario: Scenario, detect: bool = True) -> Trace:
    """Execute ``scenario`` under its schedule and return the full trace."""
    problems = validate(scenario)
    if problems:
        raise ScenarioError("; ".join(problems))
    sim = Simulator(scenario, detect=detect)
    sched = scenario.schedule
    if isinstance(sched, ExplicitSchedule):
        for p in sched.order:
            sim.step(p)
    else:
        rng = SplitMix64(sched.seed)
        while not sim.done:
            ready = sim.runnable()
            if not ready:
                raise StructuralError("no runnable process but work remains")
            sim.step(ready[rng.below(len(ready))])
    return sim.trace()


def run_seeds(scenario: Scenario, seeds: Sequence[int], detect: bool = True) -> list[Trace]:
    return [run(scenario.with_schedule(SeededSchedule(s)), detect=detect) for s in seeds]
