"""Distributed shared memory simulator with one-sided put/get and
vector-clock race detection."""

from .clock import ClockError, ClockOrdering, VectorClock, compare_clocks, increment, max_clock
from .memory import Address, Cell, Memory, ScenarioError, Space, StructuralError
from .oracle import build_hb_graph, check_trace, concurrent, racy_cells, racy_pairs
from .rdma import AccessKind, RdmaEngine
from .scenario_file import load_golden, load_scenario, parse_scenario
from .sim import ExplicitSchedule, Scenario, ScheduleError, SeededSchedule, Simulator, Statement, run, validate
from .trace import Event, EventKind, RaceReport, Trace

__version__ = "0.1.0"

__all__ = [
    "AccessKind",
    "Address",
    "Cell",
    "ClockError",
    "ClockOrdering",
    "Event",
    "EventKind",
    "ExplicitSchedule",
    "Memory",
    "RaceReport",
    "RdmaEngine",
    "Scenario",
    "ScenarioError",
    "ScheduleError",
    "SeededSchedule",
    "Simulator",
    "Space",
    "Statement",
    "StructuralError",
    "Trace",
    "VectorClock",
    "build_hb_graph",
    "check_trace",
    "compare_clocks",
    "concurrent",
    "increment",
    "load_golden",
    "load_scenario",
    "max_clock",
    "parse_scenario",
    "racy_cells",
    "racy_pairs",
    "run",
    "validate",
]
