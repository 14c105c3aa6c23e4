"""Brute-force happens-before over a finished trace.

The graph is built from the trace's structure alone (which node each event
ran on, which events belong to the same operation, which write a read
observed); recorded clocks are never consulted while building it.  Edges:

* program order: consecutive clock events at the same node;
* messages: put-send -> put-apply, get-request -> get-serve -> get-reply;
* data: put-apply -> every later get-serve that returned that write's value.

An access (put or get) spans from its issue event at the initiator to its
effect event at the cell owner.  Two accesses are ordered when the effect of
one reaches the issue of the other; otherwise they are concurrent, and a
concurrent pair on one cell with at least one write is a race.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .clock import ClockOrdering, compare_clocks
from .memory import Address, StructuralError
from .trace import Event, EventKind, Trace


@dataclass(frozen=True)
class Access:
    op: str
    cell: Address
    write: bool
    issue: int
    effect: int


@dataclass
class HbGraph:
    nodes: list[int]
    edges: set[tuple[int, int, str]]
    accesses: list[Access]
    reach: np.ndarray = field(repr=False)
    index: dict[int, int] = field(repr=False)
    span: dict[int, tuple[int, int]] = field(repr=False)

    def reachable(self, a: int, b: int) -> bool:
        """Strict path ``a -> ... -> b``."""
        return bool(self.reach[self._ix(a), self._ix(b)])

    def _ix(self, e: int) -> int:
        try:
            return self.index[e]
        except KeyError:
            raise StructuralError(f"event {e} is not a node of the happens-before graph") from None

    def edges_of(self, family: str) -> list[tuple[int, int]]:
        return sorted((a, b) for a, b, f in self.edges if f == family)


def build_hb_graph(trace: Trace) -> HbGraph:
    events = [e for e in trace.events if e.kind.ticks]
    ids = [e.id for e in events]
    if ids != sorted(ids) or len(set(ids)) != len(ids):
        raise StructuralError("trace event ids are not strictly increasing")
    index = {eid: i for i, eid in enumerate(ids)}
    edges: set[tuple[int, int, str]] = set()

    last_at: dict[int, int] = {}
    for e in events:
        if e.process in last_at:
            edges.add((last_at[e.process], e.id, "program"))
        last_at[e.process] = e.id

    by_op: dict[str, dict[EventKind, Event]] = {}
    for e in events:
        kinds = by_op.setdefault(e.op, {})
        if e.kind in kinds:
            raise StructuralError(f"operation {e.op} has two {e.kind.value} events")
        kinds[e.kind] = e

    accesses: list[Access] = []
    span: dict[int, tuple[int, int]] = {}
    for op, kinds in by_op.items():
        if EventKind.COMPUTE in kinds:
            e = kinds[EventKind.COMPUTE]
            span[e.id] = (e.id, e.id)
            continue
        if EventKind.PUT_SEND in kinds or EventKind.PUT_APPLY in kinds:
            send, apply = kinds.get(EventKind.PUT_SEND), kinds.get(EventKind.PUT_APPLY)
            if send is None or apply is None:
                raise StructuralError(f"put {op} is missing its send or apply event")
            edges.add((send.id, apply.id, "message"))
            acc = Access(op, apply.addr, True, send.id, apply.id)
            parts = (send, apply)
        else:
            req = kinds.get(EventKind.GET_REQUEST)
            serve = kinds.get(EventKind.GET_SERVE)
            reply = kinds.get(EventKind.GET_REPLY)
            if req is None or serve is None or reply is None:
                raise StructuralError(f"get {op} is missing request, serve or reply")
            edges.add((req.id, serve.id, "message"))
            edges.add((serve.id, reply.id, "message"))
            acc = Access(op, serve.addr, False, req.id, serve.id)
            parts = (req, serve, reply)
        accesses.append(acc)
        for part in parts:
            span[part.id] = (acc.issue, acc.effect)

    last_write: dict[Address, int] = {}
    for e in events:
        if e.kind is EventKind.PUT_APPLY:
            last_write[e.addr] = e.id
        elif e.kind is EventKind.GET_SERVE and e.addr in last_write:
            edges.add((last_write[e.addr], e.id, "data"))

    n = len(ids)
    reach = np.zeros((n, n), dtype=bool)
    succ: list[list[int]] = [[] for _ in range(n)]
    for a, b, _ in edges:
        if index[a] >= index[b]:
            raise StructuralError(f"edge {a} -> {b} points backwards; trace is malformed")
        succ[index[a]].append(index[b])
    for i in range(n - 1, -1, -1):
        for j in succ[i]:
            reach[i, j] = True
            reach[i] |= reach[j]

    accesses.sort(key=lambda a: a.effect)
    return HbGraph(ids, edges, accesses, reach, index, span)


def concurrent(g: HbGraph, e1: int, e2: int) -> bool:
    """Whether the accesses (or plain events) containing ``e1`` and ``e2`` are unordered."""
    for e in (e1, e2):
        if e not in g.span:
            raise StructuralError(f"event {e} is not part of any access or compute")
    a, b = g.span[e1], g.span[e2]
    if a == b:
        return False
    return not (g.reachable(a[1], b[0]) or g.reachable(b[1], a[0]))


def racy_pairs(g: HbGraph) -> set[tuple[int, int, Address]]:
    """Concurrent same-cell access pairs with at least one write, as effect ids."""
    out = set()
    by_cell: dict[Address, list[Access]] = {}
    for acc in g.accesses:
        by_cell.setdefault(acc.cell, []).append(acc)
    for cell, accs in by_cell.items():
        for a, b in combinations(accs, 2):
            if (a.write or b.write) and concurrent(g, a.effect, b.effect):
                out.add((a.effect, b.effect, cell))
    return out


def racy_cells(g: HbGraph) -> set[Address]:
    return {cell for _, _, cell in racy_pairs(g)}


@dataclass(frozen=True)
class ClockDivergence:
    first: int
    second: int
    ordering: ClockOrdering
    happens_before: bool


def clock_divergences(trace: Trace, g: HbGraph | None = None) -> list[ClockDivergence]:
    """Pairs of clock events where clock order and graph reachability disagree."""
    g = build_hb_graph(trace) if g is None else g
    evs = [e for e in trace.events if e.kind.ticks]
    out = []
    for x, y in combinations(evs, 2):
        order = compare_clocks(x.clock_post, y.clock_post)
        hb = g.reachable(x.id, y.id)
        expected = ClockOrdering.BEFORE if hb else ClockOrdering.CONCURRENT
        if order is not expected:
            out.append(ClockDivergence(x.id, y.id, order, hb))
    return out


@dataclass
class OracleReport:
    detector_cells: set[Address]
    oracle_cells: set[Address]
    pairs: set[tuple[int, int, Address]]
    divergences: list[ClockDivergence]

    @property
    def agree(self) -> bool:
        return self.detector_cells == self.oracle_cells and not self.divergences

    def diff(self) -> dict:
        key = Address.sort_key
        return {
            "detector_only": [str(a) for a in sorted(self.detector_cells - self.oracle_cells, key=key)],
            "oracle_only": [str(a) for a in sorted(self.oracle_cells - self.detector_cells, key=key)],
            "clock_divergences": [
                {"first": d.first, "second": d.second, "clock": d.ordering.value, "hb": d.happens_before}
                for d in self.divergences
            ],
        }


def check_trace(trace: Trace) -> OracleReport:
    g = build_hb_graph(trace)
    pairs = racy_pairs(g)
    return OracleReport(
        detector_cells=trace.race_cells(),
        oracle_cells={c for _, _, c in pairs},
        pairs=pairs,
        divergences=clock_divergences(trace, g),
    )
