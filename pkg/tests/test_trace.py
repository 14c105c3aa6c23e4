import json

import pytest

from dsmrace.scenario_file import load_golden
from dsmrace.sim import run
from dsmrace.trace import EventKind, Trace


def test_jsonl_round_trip():
    t = run(load_golden("fig5c"))
    back = Trace.loads(t.dumps())
    assert back.events == t.events
    assert back.final_values == t.final_values
    assert back.scenario_hash == t.scenario_hash
    assert back.races == t.races


def test_record_layout():
    t = run(load_golden("fig5a"))
    recs = [json.loads(line) for line in t.dumps().splitlines()]
    assert recs[0]["record"] == "header" and recs[0]["processes"] == 3
    assert recs[-1]["record"] == "summary"
    assert len(recs[-1]["races"]) == 1
    ev = recs[1]
    assert set(ev) >= {"id", "kind", "process", "op", "clock_pre", "clock_post", "race"}
    assert all(isinstance(x, int) for x in ev["clock_post"])


def test_race_points_at_its_event():
    t = run(load_golden("fig5a"))
    (r,) = t.races
    assert t.events[r.event].race == r
    assert "P1.pub[0]" in r.describe()


def test_clock_history_per_process():
    t = run(load_golden("fig5b"))
    hist = [c.to_list() for c in t.process_clock_history(1)]
    assert hist[:3] == [[0, 1, 0], [1, 2, 0], [1, 3, 0]]


def test_loads_rejects_garbage():
    with pytest.raises(ValueError):
        Trace.loads('{"record": "mystery"}\n')
    with pytest.raises(ValueError):
        Trace.loads("")


def test_lock_events_do_not_tick():
    t = run(load_golden("fig4"))
    for e in t.events:
        if not e.kind.ticks:
            assert e.clock_pre == e.clock_post
    assert not EventKind.UNLOCK.ticks and EventKind.GET_SERVE.ticks
