"""Partitioned global address space with per-cell clocks and FIFO locks.

Every process maps a private and a public space.  A cell in either space is
addressed by ``(process, space, offset)``; its textual form is
``P<k>.<pub|priv>[<offset>]``.
"""

from __future__ import annotations

import enum
import re
from collections import deque
from dataclasses import dataclass, field
from typing import Any

from .clock import VectorClock


class ScenarioError(ValueError):
    """The scenario asks for something the memory model does not allow."""


class StructuralError(RuntimeError):
    """Internal misuse: lock protocol broken, clock regression, and so on."""


class Space(enum.Enum):
    PUBLIC = "pub"
    PRIVATE = "priv"

    @classmethod
    def parse(cls, text: str) -> Space:
        t = text.strip().lower()
        if t in ("pub", "public"):
            return cls.PUBLIC
        if t in ("priv", "private"):
            return cls.PRIVATE
        raise ScenarioError(f"unknown memory space {text!r}")


_ADDR_RE = re.compile(r"^\s*P(\d+)\.(pub|priv|public|private)\[(\d+)\]\s*$")


@dataclass(frozen=True, slots=True)
class Address:
    process: int
    space: Space
    offset: int

    def __str__(self) -> str:
        return f"P{self.process}.{self.space.value}[{self.offset}]"

    def sort_key(self) -> tuple[int, int, int]:
        return (self.process, 0 if self.space is Space.PRIVATE else 1, self.offset)

    @property
    def is_public(self) -> bool:
        return self.space is Space.PUBLIC

    @classmethod
    def parse(cls, text: str) -> Address:
        m = _ADDR_RE.match(text)
        if not m:
            raise ScenarioError(f"malformed address {text!r}; expected e.g. 'P1.pub[0]'")
        return cls(int(m.group(1)), Space.parse(m.group(2)), int(m.group(3)))


KEEP = object()  # sentinel for store_cell_clocks: leave the value alone


class LockResult(enum.Enum):
    GRANTED = "granted"
    QUEUED = "queued"


@dataclass
class Cell:
    value: Any
    v_clock: VectorClock
    w_clock: VectorClock | None  # None for private cells
    holder: str | None = None
    wait_queue: deque[str] = field(default_factory=deque)

    @property
    def locked(self) -> bool:
        return self.holder is not None


@dataclass
class ProcessState:
    id: int
    local_clock: VectorClock
    private_cells: dict[int, Cell] = field(default_factory=dict)
    public_cells: dict[int, Cell] = field(default_factory=dict)


class Memory:
    """All processes' address spaces.

    Clock reads and writes require the caller to hold the cell lock; lock
    requests on a held cell are queued FIFO and handed over on unlock.
    """

    def __init__(self, n: int):
        if n < 1:
            raise ScenarioError("need at least one process")
        self.n = n
        self.processes = [ProcessState(i, VectorClock.zero(n)) for i in range(n)]
        self.frozen = False

    def _space(self, addr: Address) -> dict[int, Cell]:
        if not 0 <= addr.process < self.n:
            raise ScenarioError(f"{addr}: process out of range (n={self.n})")
        p = self.processes[addr.process]
        return p.public_cells if addr.is_public else p.private_cells

    def cell(self, addr: Address) -> Cell:
        try:
            return self._space(addr)[addr.offset]
        except KeyError:
            raise ScenarioError(f"{addr} is not defined") from None

    def has_cell(self, addr: Address) -> bool:
        try:
            return addr.offset in self._space(addr)
        except ScenarioError:
            return False

    def addresses(self) -> list[Address]:
        out = []
        for p in self.processes:
            out += [Address(p.id, Space.PRIVATE, o) for o in sorted(p.private_cells)]
            out += [Address(p.id, Space.PUBLIC, o) for o in sorted(p.public_cells)]
        return out

    def define_cell(self, addr: Address, initial_value: Any) -> None:
        if self.frozen:
            raise ScenarioError("cells cannot be defined once the scenario is running")
        if addr.offset < 0:
            raise ScenarioError(f"{addr}: negative offset")
        space = self._space(addr)
        if addr.offset in space:
            raise ScenarioError(f"{addr} defined twice")
        zero = VectorClock.zero(self.n)
        space[addr.offset] = Cell(initial_value, zero, zero if addr.is_public else None)

    def lock(self, addr: Address, requester: str) -> LockResult:
        c = self.cell(addr)
        if c.holder is None:
            c.holder = requester
            return LockResult.GRANTED
        if c.holder == requester or requester in c.wait_queue:
            raise StructuralError(f"{requester} requested {addr} twice")
        c.wait_queue.append(requester)
        return LockResult.QUEUED

    def unlock(self, addr: Address, holder: str) -> str | None:
        """Release ``addr``; returns the operation now holding it, if any."""
        c = self.cell(addr)
        if c.holder != holder:
            raise StructuralError(f"{holder} unlocked {addr} held by {c.holder}")
        c.holder = c.wait_queue.popleft() if c.wait_queue else None
        return c.holder

    def _require_holder(self, addr: Address, holder: str) -> Cell:
        c = self.cell(addr)
        if c.holder != holder:
            raise StructuralError(f"{holder} touched {addr} without holding its lock")
        return c

    def read_cell_clocks(self, addr: Address, holder: str) -> tuple[VectorClock, VectorClock]:
        c = self._require_holder(addr, holder)
        return c.v_clock, c.w_clock if c.w_clock is not None else c.v_clock

    def read_value(self, addr: Address, holder: str) -> Any:
        return self._require_holder(addr, holder).value

    def store_cell_clocks(
        self,
        addr: Address,
        holder: str,
        v: VectorClock,
        w: VectorClock | None = None,
        value: Any = KEEP,
    ) -> None:
        c = self._require_holder(addr, holder)
        if not c.v_clock <= v:
            raise StructuralError(f"{addr}: V would regress from {c.v_clock} to {v}")
        if c.w_clock is not None:
            w = c.w_clock if w is None else w
            if not c.w_clock <= w:
                raise StructuralError(f"{addr}: W would regress from {c.w_clock} to {w}")
            if not w <= v:
                raise StructuralError(f"{addr}: W={w} not below V={v}")
            c.w_clock = w
        c.v_clock = v
        if value is not KEEP:
            c.value = value

    def snapshot_values(self) -> dict[str, Any]:
        return {str(a): self.cell(a).value for a in self.addresses()}
