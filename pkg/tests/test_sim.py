import pytest

from dsmrace.memory import Address, ScenarioError, Space, StructuralError
from dsmrace.scenario_file import load_golden
from dsmrace.sim import (
    ExplicitSchedule,
    Scenario,
    ScheduleError,
    SeededSchedule,
    Simulator,
    SplitMix64,
    Statement,
    run,
    validate,
)
from dsmrace.trace import EventKind

from conftest import corpus

pub = lambda p, k=0: Address(p, Space.PUBLIC, k)  # noqa: E731
priv = lambda p, k=0: Address(p, Space.PRIVATE, k)  # noqa: E731


def test_splitmix64_reference_outputs():
    g = SplitMix64(1234567)
    assert [g.next_u64() for _ in range(5)] == [
        6457827717110365317,
        3203168211198807973,
        9817491932198370423,
        4593380528125082431,
        16408922859458223821,
    ]
    assert SplitMix64(0).next_u64() == 0xE220A8397B1DCDAF


def test_below_is_in_range_and_rejects_bad_bound():
    g = SplitMix64(3)
    assert {g.below(3) for _ in range(200)} == {0, 1, 2}
    with pytest.raises(ValueError):
        g.below(0)


def two_puts(order=(0, 0, 2, 2)):
    return Scenario(
        3,
        ((pub(1), 0), (priv(0), 10), (priv(2), 20)),
        ((Statement("put", priv(0), pub(1)),), (), (Statement("put", priv(2), pub(1)),)),
        ExplicitSchedule(tuple(order)),
    )


def test_validate_accepts_golden():
    assert validate(two_puts()) == []


@pytest.mark.parametrize(
    "mutate, needle",
    [
        (lambda s: Scenario(s.n, s.cells[:1], s.programs, s.schedule), "not declared"),
        (lambda s: Scenario(s.n, s.cells + ((pub(1), 3),), s.programs, s.schedule), "declared twice"),
        (lambda s: Scenario(s.n, s.cells + ((pub(7), 3),), s.programs, s.schedule), "out of range"),
        (lambda s: s.with_schedule(ExplicitSchedule((0,))), "fewer than"),
        (lambda s: s.with_schedule(ExplicitSchedule((0, 2, 2, 5))), "not a process index"),
        (lambda s: s.with_schedule(ExplicitSchedule((0, 2, 2, 2))), "needs at least"),
        (lambda s: s.with_schedule(SeededSchedule(-1)), "unsigned 64-bit"),
        (lambda s: Scenario(s.n, s.cells, ((Statement("fetch"),), (), ()), s.schedule), "unknown op"),
        (lambda s: Scenario(s.n, s.cells, ((Statement("put", pub(1), priv(0)),), (), ()), s.schedule), "must be"),
    ],
)
def test_validate_reports_violations(mutate, needle):
    problems = validate(mutate(two_puts()))
    assert any(needle in p for p in problems), problems
    with pytest.raises(ScenarioError):
        run(mutate(two_puts()))


def test_validate_collects_several_violations():
    s = Scenario(2, (), ((Statement("get", pub(1), priv(0)),), (Statement("bogus"),)), SeededSchedule(0))
    assert len(validate(s)) >= 3


def test_explicit_schedule_stepping_blocked_process_is_rejected():
    # fig4's schedule with P0's apply moved ahead of P1's reply: P0 is still waiting then.
    s = load_golden("fig4").with_schedule(ExplicitSchedule((1, 0, 0, 0, 1)))
    (problem,) = validate(s)
    assert "waiting for a lock" in problem


def test_step_errors():
    sim = Simulator(two_puts())
    with pytest.raises(ScheduleError):
        sim.step(1)  # empty program
    with pytest.raises(ScheduleError):
        sim.step(9)
    sim.step(0)
    sim.step(0)
    with pytest.raises(ScheduleError):
        sim.step(0)


def test_fig4_lock_wait_then_grant():
    t = run(load_golden("fig4"))
    kinds = [(e.kind, e.op) for e in t.events]
    wait = kinds.index((EventKind.LOCK_WAIT, "P0:0"))
    grant = kinds.index((EventKind.LOCK_GRANT, "P0:0"))
    reply = kinds.index((EventKind.GET_REPLY, "P1:0"))
    apply = kinds.index((EventKind.PUT_APPLY, "P0:0"))
    assert wait < reply < grant < apply
    assert t.final_values["P2.pub[0]"] == 99
    assert t.final_values["P1.priv[0]"] == 5


def test_scenario_digest_is_stable_and_schedule_sensitive():
    s = two_puts()
    assert s.digest() == two_puts().digest()
    assert s.digest() != s.with_schedule(ExplicitSchedule((2, 2, 0, 0))).digest()


def test_seed_determinism():
    s = load_golden("fig5c").with_schedule(SeededSchedule(42))
    assert run(s).dumps() == run(s).dumps()
    for sc in corpus(50, seed=5):
        assert run(sc).dumps() == run(sc).dumps()


def test_completeness_and_program_order():
    for s in corpus(300, seed=17):
        t = run(s)
        ops = {f"P{p}:{k}" for p, prog in enumerate(s.programs) for k in range(len(prog))}
        finals = {
            e.op
            for e in t.events
            if e.kind in (EventKind.COMPUTE, EventKind.PUT_APPLY, EventKind.GET_REPLY)
        }
        assert finals == ops
        for p in range(s.n):
            issued = [
                int(e.op.split(":")[1])
                for e in t.events
                if e.initiator == p and e.kind in (EventKind.COMPUTE, EventKind.PUT_SEND, EventKind.GET_REQUEST)
            ]
            assert issued == list(range(len(s.programs[p])))


def _hold_intervals(trace):
    """Per public cell, the [first touch, unlock] interval of every op that locked it."""
    first: dict = {}
    out: dict = {}
    for e in trace.events:
        if e.addr is None or not e.addr.is_public:
            continue
        key = (e.addr, e.op)
        if e.kind in (EventKind.PUT_APPLY, EventKind.GET_SERVE, EventKind.LOCK_GRANT):
            first.setdefault(key, e.id)
        if e.kind is EventKind.UNLOCK:
            out.setdefault(e.addr, []).append((first[key], e.id, e.op))
    return out


def test_lock_exclusivity_and_fifo():
    for s in corpus(300, seed=19):
        t = run(s)
        for cell, spans in _hold_intervals(t).items():
            spans.sort()
            for (a0, a1, _), (b0, b1, _) in zip(spans, spans[1:]):
                assert a1 < b0, f"overlapping holds on {cell}"
        waits: dict = {}
        grants: dict = {}
        for e in t.events:
            if e.kind is EventKind.LOCK_WAIT:
                waits.setdefault(e.addr, []).append(e.op)
            elif e.kind is EventKind.LOCK_GRANT:
                grants.setdefault(e.addr, []).append(e.op)
        assert waits == grants


def test_every_event_numbered_densely():
    t = run(load_golden("fig5c"))
    assert [e.id for e in t.events] == list(range(len(t.events)))


def test_remote_ops_never_deadlock():
    for s in corpus(300, seed=23, max_statements=20):
        try:
            run(s)
        except StructuralError as exc:  # pragma: no cover - reported with the scenario
            pytest.fail(f"{exc}\n{s.to_dict()}")
