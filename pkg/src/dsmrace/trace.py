"""Trace records: events, race reports and their line-delimited JSON form."""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from typing import Any, Iterable, TextIO

from .clock import ClockOrdering, VectorClock
from .memory import Address

TRACE_FORMAT = 1


class EventKind(enum.Enum):
    PUT_SEND = "put-send"
    PUT_APPLY = "put-apply"
    GET_REQUEST = "get-request"
    GET_SERVE = "get-serve"
    GET_REPLY = "get-reply"
    COMPUTE = "compute"
    LOCK_WAIT = "lock-wait"
    LOCK_GRANT = "lock-grant"
    UNLOCK = "unlock"

    @property
    def ticks(self) -> bool:
        """Whether the event advances a process clock (lock bookkeeping does not)."""
        return self not in (EventKind.LOCK_WAIT, EventKind.LOCK_GRANT, EventKind.UNLOCK)


@dataclass(frozen=True)
class RaceReport:
    cell: Address
    event: int
    op: str
    incoming_clock: VectorClock
    stored_clock: VectorClock
    kind_conflict: str  # "write-vs-access" or "read-vs-write"
    ordering: ClockOrdering

    def to_dict(self) -> dict[str, Any]:
        return {
            "cell": str(self.cell),
            "event": self.event,
            "op": self.op,
            "incoming_clock": self.incoming_clock.to_list(),
            "stored_clock": self.stored_clock.to_list(),
            "kind_conflict": self.kind_conflict,
            "ordering": self.ordering.value,
        }

    def describe(self) -> str:
        return (
            f"race on {self.cell} at event {self.event} ({self.op}, {self.kind_conflict}): "
            f"incoming {self.incoming_clock} vs stored {self.stored_clock} [{self.ordering.value}]"
        )


def _clk(c: VectorClock | None) -> list[int] | None:
    return None if c is None else c.to_list()


@dataclass
class Event:
    """One trace step.

    ``process`` is the node the event happens at: for ``put-apply`` and
    ``get-serve`` that is the owner of the cell, not the initiator.
    """

    kind: EventKind
    process: int
    op: str
    initiator: int
    clock_pre: VectorClock
    clock_post: VectorClock
    addr: Address | None = None
    cell_v_pre: VectorClock | None = None
    cell_v_post: VectorClock | None = None
    cell_w_pre: VectorClock | None = None
    cell_w_post: VectorClock | None = None
    value: Any = None
    race: RaceReport | None = None
    id: int = -1

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "kind": self.kind.value,
            "process": self.process,
            "op": self.op,
            "initiator": self.initiator,
            "addr": None if self.addr is None else str(self.addr),
            "clock_pre": self.clock_pre.to_list(),
            "clock_post": self.clock_post.to_list(),
            "cell_v_pre": _clk(self.cell_v_pre),
            "cell_v_post": _clk(self.cell_v_post),
            "cell_w_pre": _clk(self.cell_w_pre),
            "cell_w_post": _clk(self.cell_w_post),
            "value": self.value,
            "race": None if self.race is None else self.race.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> Event:
        def clk(key: str) -> VectorClock | None:
            v = d.get(key)
            return None if v is None else VectorClock(tuple(v))

        race = None
        if d.get("race") is not None:
            r = d["race"]
            race = RaceReport(
                cell=Address.parse(r["cell"]),
                event=r["event"],
                op=r["op"],
                incoming_clock=VectorClock(tuple(r["incoming_clock"])),
                stored_clock=VectorClock(tuple(r["stored_clock"])),
                kind_conflict=r["kind_conflict"],
                ordering=ClockOrdering(r["ordering"]),
            )
        return cls(
            kind=EventKind(d["kind"]),
            process=d["process"],
            op=d["op"],
            initiator=d["initiator"],
            clock_pre=VectorClock(tuple(d["clock_pre"])),
            clock_post=VectorClock(tuple(d["clock_post"])),
            addr=None if d.get("addr") is None else Address.parse(d["addr"]),
            cell_v_pre=clk("cell_v_pre"),
            cell_v_post=clk("cell_v_post"),
            cell_w_pre=clk("cell_w_pre"),
            cell_w_post=clk("cell_w_post"),
            value=d.get("value"),
            race=race,
            id=d["id"],
        )


@dataclass
class Trace:
    scenario_hash: str
    n: int
    events: list[Event] = field(default_factory=list)
    final_values: dict[str, Any] = field(default_factory=dict)
    detect: bool = True

    @property
    def races(self) -> list[RaceReport]:
        return [e.race for e in self.events if e.race is not None]

    def race_cells(self) -> set[Address]:
        return {r.cell for r in self.races}

    def value_movements(self) -> list[tuple[str, str, str, Any]]:
        """Data transfers in trace order: ``(op, kind, cell, value)``."""
        out = []
        for e in self.events:
            if e.kind in (EventKind.PUT_APPLY, EventKind.GET_SERVE, EventKind.GET_REPLY):
                out.append((e.op, e.kind.value, str(e.addr), e.value))
        return out

    def process_clock_history(self, p: int) -> list[VectorClock]:
        return [e.clock_post for e in self.events if e.process == p and e.kind.ticks]

    def to_records(self) -> Iterable[dict[str, Any]]:
        yield {
            "record": "header",
            "format": TRACE_FORMAT,
            "scenario_hash": self.scenario_hash,
            "processes": self.n,
            "detect": self.detect,
        }
        for e in self.events:
            yield {"record": "event", **e.to_dict()}
        yield {
            "record": "summary",
            "events": len(self.events),
            "races": [r.to_dict() for r in self.races],
            "final_values": self.final_values,
        }

    def dumps(self) -> str:
        return "".join(json.dumps(r, separators=(",", ":")) + "\n" for r in self.to_records())

    def write(self, fh: TextIO) -> None:
        fh.write(self.dumps())

    @classmethod
    def loads(cls, text: str) -> Trace:
        header = None
        events = []
        final: dict[str, Any] = {}
        for lineno, line in enumerate(text.splitlines(), 1):
            if not line.strip():
                continue
            rec = json.loads(line)
            kind = rec.pop("record", None)
            if kind == "header":
                header = rec
            elif kind == "event":
                events.append(Event.from_dict(rec))
            elif kind == "summary":
                final = rec.get("final_values", {})
            else:
                raise ValueError(f"line {lineno}: unknown record type {kind!r}")
        if header is None:
            raise ValueError("trace has no header record")
        return cls(header["scenario_hash"], header["processes"], events, final, header.get("detect", True))
