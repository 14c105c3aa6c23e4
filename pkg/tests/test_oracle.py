import pytest

from dsmrace.memory import Address, Space, StructuralError
from dsmrace.oracle import (
    build_hb_graph,
    check_trace,
    clock_divergences,
    concurrent,
    racy_cells,
    racy_pairs,
)
from dsmrace.scenario_file import GOLDEN, load_golden
from dsmrace.sim import run
from dsmrace.trace import EventKind, Trace

from conftest import corpus


def ev(trace, kind, op):
    (e,) = [e for e in trace.events if e.kind is kind and e.op == op]
    return e.id


def test_fig5a_puts_are_concurrent():
    t = run(load_golden("fig5a"))
    g = build_hb_graph(t)
    a, b = ev(t, EventKind.PUT_APPLY, "P0:0"), ev(t, EventKind.PUT_APPLY, "P2:0")
    assert concurrent(g, a, b)
    assert racy_cells(g) == {Address(1, Space.PUBLIC, 0)}


def test_fig5b_get_is_ordered_before_later_put():
    t = run(load_golden("fig5b"))
    g = build_hb_graph(t)
    serve = ev(t, EventKind.GET_SERVE, "P1:0")
    m3_send = ev(t, EventKind.PUT_SEND, "P2:0")
    assert g.reachable(serve, m3_send)
    assert not concurrent(g, serve, ev(t, EventKind.PUT_APPLY, "P2:0"))
    assert racy_pairs(g) == set()


def test_fig3_concurrent_reads_are_not_racy():
    t = run(load_golden("fig3"))
    g = build_hb_graph(t)
    a, b = ev(t, EventKind.GET_SERVE, "P0:0"), ev(t, EventKind.GET_SERVE, "P2:0")
    assert concurrent(g, a, b)
    assert racy_pairs(g) == set()


def test_fig5c_second_write_concurrent_with_first():
    t = run(load_golden("fig5c"))
    g = build_hb_graph(t)
    first = ev(t, EventKind.PUT_APPLY, "P0:0")
    last = ev(t, EventKind.PUT_APPLY, "P3:0")
    assert concurrent(g, first, last)
    assert racy_cells(g) == {Address(1, Space.PUBLIC, 0)}


def test_event_not_concurrent_with_itself():
    t = run(load_golden("fig5a"))
    g = build_hb_graph(t)
    for e in t.events:
        if e.kind.ticks:
            assert not concurrent(g, e.id, e.id)
    # events of one access share a span, so they are not concurrent either
    assert not concurrent(g, ev(t, EventKind.PUT_SEND, "P0:0"), ev(t, EventKind.PUT_APPLY, "P0:0"))


def test_unknown_event_raises():
    g = build_hb_graph(run(load_golden("fig5a")))
    with pytest.raises(StructuralError):
        concurrent(g, 0, 10_000)
    with pytest.raises(StructuralError):
        g.reachable(10_000, 0)


def test_edge_families():
    t = run(load_golden("fig5b"))
    g = build_hb_graph(t)
    assert len(g.edges_of("message")) == 2 + 1 + 1  # one get, two puts
    assert g.edges_of("data") == []  # no get reads a cell written earlier
    assert all(a < b for a, b, _ in g.edges)


def test_malformed_trace_raises():
    t = run(load_golden("fig5a"))
    missing = Trace(t.scenario_hash, t.n, [e for e in t.events if e.kind is not EventKind.PUT_APPLY])
    with pytest.raises(StructuralError):
        build_hb_graph(missing)
    shuffled = Trace(t.scenario_hash, t.n, list(reversed(t.events)))
    with pytest.raises(StructuralError):
        build_hb_graph(shuffled)


@pytest.mark.parametrize("name", GOLDEN)
def test_golden_agreement(name):
    assert check_trace(run(load_golden(name))).agree


def test_clock_order_matches_happens_before():
    for s in corpus(300, seed=29):
        t = run(s)
        assert clock_divergences(t) == []


def test_detector_matches_oracle_on_random_corpus():
    for s in corpus(300, seed=31):
        rep = check_trace(run(s))
        assert rep.agree, rep.diff()
