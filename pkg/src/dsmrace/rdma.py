"""One-sided put/get with dual-clock race detection.

Each remote operation is split into the phases the scheduler interleaves:

* put: ``put_send`` at the initiator, ``put_apply`` at the owner of ``dst``;
* get: ``get_request`` at the initiator immediately followed by the serve at
  the owner of ``src``, then ``get_reply`` back at the initiator.

Every event ticks the clock of the node it happens at.  Arrivals at a
process's public memory are events on that process's timeline: the NIC shares
the node's logical clock, so an arrival merges into it (the owner's program is
never told, but its next event is causally after the arrival).

Race check, performed under the cell lock before any clock merge:

* a put (write) compares the initiator's send clock against the cell's
  general clock ``V`` (every previous access);
* a get (read) compares the request clock against the write clock ``W``
  (previous writes only), so concurrent reads are never reported.

A race is reported whenever the stored clock is not below the incoming one.
Reports are data; execution always continues.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace
from typing import Any

from .clock import ClockOrdering, VectorClock, compare_clocks, increment, max_clock
from .memory import Address, LockResult, Memory, ScenarioError, StructuralError
from .trace import Event, EventKind, RaceReport

__all__ = [
    "AccessKind",
    "RaceReport",
    "RdmaEngine",
    "check_put_args",
    "check_get_args",
]

WRITE_VS_ACCESS = "write-vs-access"
READ_VS_WRITE = "read-vs-write"


class AccessKind:
    READ = "read"
    WRITE = "write"


def check_put_args(initiator: int, src: Address, dst: Address) -> None:
    if src.process != initiator or src.is_public:
        raise ScenarioError(f"put by P{initiator}: source {src} must be a private cell of P{initiator}")
    if not dst.is_public:
        raise ScenarioError(f"put by P{initiator}: destination {dst} must be public")


def check_get_args(initiator: int, src: Address, dst: Address) -> None:
    if not src.is_public:
        raise ScenarioError(f"get by P{initiator}: source {src} must be public")
    if dst.process != initiator or dst.is_public:
        raise ScenarioError(f"get by P{initiator}: destination {dst} must be a private cell of P{initiator}")


@dataclass(frozen=True)
class PutMessage:
    clock: VectorClock
    value: Any


@dataclass(frozen=True)
class GetReply:
    clock: VectorClock
    value: Any


class RdmaEngine:
    """Put/get engine over a :class:`Memory`.

    With ``detect=False`` no clock is read, merged or compared; only values
    move.  That mode exists to show detection never alters data flow.
    """

    def __init__(self, memory: Memory, detect: bool = True):
        self.memory = memory
        self.detect = detect
        self._direct_ids = itertools.count()
        self.log: list[Event] = []

    def _record(self, events: list[Event]) -> list[Event]:
        for e in events:
            e.id = len(self.log)
            if e.race is not None:
                e.race = replace(e.race, event=e.id)
            self.log.append(e)
        return events

    @property
    def n(self) -> int:
        return self.memory.n

    def clock_of(self, p: int) -> VectorClock:
        return self.memory.processes[p].local_clock

    def _set_clock(self, p: int, c: VectorClock) -> None:
        self.memory.processes[p].local_clock = c

    def _tick(self, p: int, incoming: VectorClock | None = None) -> tuple[VectorClock, VectorClock]:
        pre = self.clock_of(p)
        if not self.detect:
            return pre, pre
        post = increment(pre if incoming is None else max_clock(pre, incoming), p)
        self._set_clock(p, post)
        return pre, post

    # -- locks ---------------------------------------------------------------

    def acquire(self, op: str, initiator: int, addr: Address) -> tuple[bool, list[Event]]:
        """Request ``addr`` for ``op``; queued requests produce a lock-wait."""
        if self.memory.cell(addr).holder == op:
            return True, []
        if self.memory.lock(addr, op) is LockResult.GRANTED:
            return True, []
        c = self.clock_of(initiator)
        return False, self._record([Event(EventKind.LOCK_WAIT, initiator, op, initiator, c, c, addr=addr)])

    def release(self, op: str, initiator: int, addr: Address) -> list[Event]:
        nxt = self.memory.unlock(addr, op)
        if not addr.is_public:
            return []
        c = self.clock_of(initiator)
        events = [Event(EventKind.UNLOCK, initiator, op, initiator, c, c, addr=addr)]
        if nxt is not None:
            waiter = op_initiator(nxt)
            wc = self.clock_of(waiter)
            events.append(Event(EventKind.LOCK_GRANT, waiter, nxt, waiter, wc, wc, addr=addr))
        return self._record(events)

    # -- phases --------------------------------------------------------------

    def compute(self, op: str, initiator: int) -> list[Event]:
        pre, post = self._tick(initiator)
        return self._record([Event(EventKind.COMPUTE, initiator, op, initiator, pre, post)])

    def put_send(self, op: str, initiator: int, src: Address, dst: Address) -> tuple[list[Event], PutMessage]:
        check_put_args(initiator, src, dst)
        ok, _ = self.acquire(op, initiator, src)
        if not ok:
            raise StructuralError(f"{op}: private source {src} is locked")
        pre, post = self._tick(initiator)
        v_pre, _ = self.memory.read_cell_clocks(src, op)
        value = self.memory.read_value(src, op)
        if self.detect:
            self.memory.store_cell_clocks(src, op, post)
        ev = Event(
            EventKind.PUT_SEND, initiator, op, initiator, pre, post, addr=src,
            cell_v_pre=v_pre, cell_v_post=self.memory.cell(src).v_clock, value=value,
        )
        return self._record([ev]), PutMessage(post, value)

    def put_apply(self, op: str, initiator: int, src: Address, dst: Address, msg: PutMessage) -> list[Event]:
        """Write ``msg`` into ``dst``; the caller must already hold the dst lock."""
        owner = dst.process
        v_pre, w_pre = self.memory.read_cell_clocks(dst, op)
        ev = Event(
            EventKind.PUT_APPLY, owner, op, initiator, self.clock_of(owner), self.clock_of(owner),
            addr=dst, cell_v_pre=v_pre, cell_w_pre=w_pre, value=msg.value,
        )
        if self.detect and is_race(msg.clock, v_pre):
            ev.race = RaceReport(
                dst, -1, op, msg.clock, v_pre, WRITE_VS_ACCESS, compare_clocks(msg.clock, v_pre)
            )
        ev.clock_pre, ev.clock_post = self._tick(owner, msg.clock)
        if self.detect:
            self.memory.store_cell_clocks(dst, op, ev.clock_post, ev.clock_post, value=msg.value)
        else:
            self.memory.store_cell_clocks(dst, op, v_pre, w_pre, value=msg.value)
        ev.cell_v_post, ev.cell_w_post = self.memory.read_cell_clocks(dst, op)
        self._record([ev])
        return [ev] + self.release(op, initiator, dst) + self.release(op, initiator, src)

    def get_request(self, op: str, initiator: int, src: Address, dst: Address) -> tuple[list[Event], GetReply]:
        """Request and serve; the caller must hold both the dst and src locks."""
        check_get_args(initiator, src, dst)
        pre, post = self._tick(initiator)
        req = Event(EventKind.GET_REQUEST, initiator, op, initiator, pre, post, addr=src)
        owner = src.process
        v_pre, w_pre = self.memory.read_cell_clocks(src, op)
        value = self.memory.read_value(src, op)
        serve = Event(
            EventKind.GET_SERVE, owner, op, initiator, self.clock_of(owner), self.clock_of(owner),
            addr=src, cell_v_pre=v_pre, cell_w_pre=w_pre, value=value,
        )
        if self.detect and is_race(post, w_pre):
            serve.race = RaceReport(src, -1, op, post, w_pre, READ_VS_WRITE, compare_clocks(post, w_pre))
        serve.clock_pre, serve.clock_post = self._tick(owner, post)
        if self.detect:
            self.memory.store_cell_clocks(src, op, serve.clock_post)
        serve.cell_v_post, serve.cell_w_post = self.memory.read_cell_clocks(src, op)
        return self._record([req, serve]), GetReply(serve.clock_post, value)

    def get_reply(self, op: str, initiator: int, src: Address, dst: Address, reply: GetReply) -> list[Event]:
        pre, post = self._tick(initiator, reply.clock)
        v_pre, _ = self.memory.read_cell_clocks(dst, op)
        self.memory.store_cell_clocks(dst, op, post if self.detect else v_pre, value=reply.value)
        ev = Event(
            EventKind.GET_REPLY, initiator, op, initiator, pre, post, addr=dst,
            cell_v_pre=v_pre, cell_v_post=self.memory.cell(dst).v_clock, value=reply.value,
        )
        self._record([ev])
        return [ev] + self.release(op, initiator, src) + self.release(op, initiator, dst)

    # -- whole operations, for direct library use -----------------------------

    def _direct_op(self, initiator: int) -> str:
        return f"P{initiator}:direct{next(self._direct_ids)}"

    def put(self, initiator: int, src: Address, dst: Address) -> list[RaceReport]:
        """Run a complete put with no interleaving.  Returns the races it raised."""
        op = self._direct_op(initiator)
        events, msg = self.put_send(op, initiator, src, dst)
        ok, _ = self.acquire(op, initiator, dst)
        if not ok:
            raise StructuralError(f"{dst} is locked; use the scheduler for interleaved operations")
        events += self.put_apply(op, initiator, src, dst, msg)
        return [e.race for e in events if e.race is not None]

    def get(self, initiator: int, src: Address, dst: Address) -> tuple[Any, list[RaceReport]]:
        """Run a complete get with no interleaving.  Returns ``(value, races)``."""
        op = self._direct_op(initiator)
        check_get_args(initiator, src, dst)
        for addr in (dst, src):
            ok, _ = self.acquire(op, initiator, addr)
            if not ok:
                raise StructuralError(f"{addr} is locked; use the scheduler for interleaved operations")
        events, reply = self.get_request(op, initiator, src, dst)
        events += self.get_reply(op, initiator, src, dst, reply)
        return reply.value, [e.race for e in events if e.race is not None]


def op_initiator(op: str) -> int:
    """Operation ids are ``P<initiator>:<tag>``."""
    return int(op[1 : op.index(":")])


def is_race(incoming: VectorClock, stored: VectorClock) -> bool:
    return compare_clocks(incoming, stored) not in (ClockOrdering.AFTER, ClockOrdering.EQUAL)
