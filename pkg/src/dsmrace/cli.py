"""Command-line front end.

Exit codes: 0 success (races or not), 1 usage error, 2 invalid scenario,
3 races found under ``--fail-on-race``, 4 detector and oracle disagree.
Race reports go to stdout; diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence, TextIO

from .memory import ScenarioError
from .oracle import OracleReport, check_trace
from .scenario_file import load_scenario
from .sim import Scenario, SeededSchedule, run
from .trace import Trace

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INVALID = 2
EXIT_RACE = 3
EXIT_DIVERGENCE = 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would exit 2, which means "invalid scenario" here
        raise UsageError(message)


def _build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="dsmrace", description="Simulate one-sided put/get programs and report races.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    r = sub.add_parser("run", help="run a scenario and report races")
    r.add_argument("scenario")
    r.add_argument("--trace-out", metavar="PATH", help="write the JSONL trace here instead of stdout")
    r.add_argument("--report", choices=("text", "json"), default="text")
    r.add_argument("--fail-on-race", action="store_true", help="exit 3 when any race is reported")
    r.add_argument("--oracle-check", action="store_true", help="cross-check against the happens-before oracle")
    r.add_argument("--seed", type=int, help="use this seeded schedule instead of the file's")

    c = sub.add_parser("check", help="compare detector verdicts with the happens-before oracle")
    c.add_argument("scenario")
    c.add_argument("--enumerate-schedules", type=int, metavar="K", help="check K seeded schedules")
    c.add_argument("--seed", type=int, help="first seed (default 0), or the single seed to use")
    c.add_argument("--report", choices=("text", "json"), default="text")
    return p


def _load(path: str, seed: int | None) -> Scenario:
    try:
        s = load_scenario(path)
    except OSError as exc:
        raise ScenarioError(f"{path}: {exc.strerror or exc}") from None
    if seed is not None:
        s = s.with_schedule(SeededSchedule(seed))
    return s


def _print_races(trace: Trace, fmt: str, out: TextIO) -> None:
    races = trace.races
    if fmt == "json":
        out.write(json.dumps({"record": "report", "races": [r.to_dict() for r in races]}) + "\n")
        return
    for r in races:
        out.write(f"RACE {r.describe()}\n")
    out.write(f"{len(races)} race(s) detected\n")


def _print_divergence(label: str, report: OracleReport, out: TextIO) -> None:
    out.write(json.dumps({"record": "divergence", "schedule": label, **report.diff()}) + "\n")


def cmd_run(args: argparse.Namespace, out: TextIO, err: TextIO) -> int:
    scenario = _load(args.scenario, args.seed)
    trace = run(scenario)
    if args.trace_out:
        with open(args.trace_out, "w", encoding="utf-8") as fh:
            trace.write(fh)
    else:
        trace.write(out)
    _print_races(trace, args.report, out)
    if args.oracle_check:
        report = check_trace(trace)
        if not report.agree:
            _print_divergence(_label(scenario), report, out)
            err.write("detector and oracle disagree\n")
            return EXIT_DIVERGENCE
    if args.fail_on_race and trace.races:
        return EXIT_RACE
    return EXIT_OK


def _label(s: Scenario) -> str:
    sch = s.schedule
    return f"seed={sch.seed}" if isinstance(sch, SeededSchedule) else "explicit"


def cmd_check(args: argparse.Namespace, out: TextIO, err: TextIO) -> int:
    if args.enumerate_schedules is not None and args.enumerate_schedules < 1:
        raise UsageError("--enumerate-schedules must be >= 1")
    base = _load(args.scenario, None)
    if args.enumerate_schedules is not None:
        first = args.seed or 0
        scenarios = [base.with_schedule(SeededSchedule(first + k)) for k in range(args.enumerate_schedules)]
    elif args.seed is not None:
        scenarios = [base.with_schedule(SeededSchedule(args.seed))]
    else:
        scenarios = [base]

    status = EXIT_OK
    for s in scenarios:
        trace = run(s)
        report = check_trace(trace)
        label = _label(s)
        if args.report == "json":
            out.write(json.dumps({
                "record": "check",
                "schedule": label,
                "agree": report.agree,
                "racy_cells": sorted(str(c) for c in report.oracle_cells),
            }) + "\n")
        else:
            verdict = "agree" if report.agree else "DIVERGE"
            cells = ", ".join(sorted(str(c) for c in report.oracle_cells)) or "none"
            out.write(f"{label}: {verdict}; racy cells: {cells}\n")
        if not report.agree:
            _print_divergence(label, report, out)
            status = EXIT_DIVERGENCE
    if status == EXIT_OK:
        out.write(f"{len(scenarios)} schedule(s) checked, detector and oracle agree\n")
    return status


def main(argv: Sequence[str] | None = None, out: TextIO | None = None, err: TextIO | None = None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "run":
            return cmd_run(args, out, err)
        return cmd_check(args, out, err)
    except UsageError as exc:
        err.write(f"dsmrace: usage error: {exc}\n")
        return EXIT_USAGE
    except ScenarioError as exc:
        err.write(f"dsmrace: invalid scenario: {exc}\n")
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
