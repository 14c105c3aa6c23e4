"""Scenario files: JSON documents with a ``format`` version key.

::

    {
      "format": 1,
      "processes": 3,
      "cells": [{"process": 1, "space": "pub", "offset": 0, "value": 0}, ...],
      "programs": {"0": [{"op": "put", "src": "P0.priv[0]", "dst": "P1.pub[0]"}], ...},
      "schedule": {"explicit": [0, 0, 2, 2]}      # or {"seed": 42}
    }

Processes without an entry under ``programs`` run nothing.
"""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path
from typing import Any

from .memory import Address, ScenarioError, Space
from .sim import ExplicitSchedule, Scenario, SeededSchedule, Statement

SUPPORTED_FORMATS = (1,)
GOLDEN = ("fig3", "fig4", "fig5a", "fig5b", "fig5c")


class ScenarioFileError(ScenarioError):
    def __init__(self, message: str, source: str = "<scenario>", line: int | None = None):
        self.source = source
        self.line = line
        loc = f"{source}:{line}" if line is not None else source
        super().__init__(f"{loc}: {message}")


def _locate(text: str, needle: str) -> int | None:
    """Best-effort line number of the first occurrence of ``needle``."""
    pos = text.find(needle)
    return None if pos < 0 else text.count("\n", 0, pos) + 1


def _addr(value: Any, where: str) -> Address:
    if isinstance(value, str):
        return Address.parse(value)
    if isinstance(value, dict):
        try:
            return Address(int(value["process"]), Space.parse(value["space"]), int(value["offset"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise ScenarioError(f"{where}: bad address object {value!r}") from exc
    raise ScenarioError(f"{where}: bad address {value!r}")


def scenario_from_dict(doc: Any, name: str = "") -> Scenario:
    if not isinstance(doc, dict):
        raise ScenarioError("top level must be an object")
    fmt = doc.get("format")
    if fmt not in SUPPORTED_FORMATS:
        raise ScenarioError(f"unsupported format {fmt!r}; expected one of {SUPPORTED_FORMATS}")
    n = doc.get("processes")
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ScenarioError(f"'processes' must be a positive integer, got {n!r}")

    cells = []
    for i, c in enumerate(doc.get("cells", [])):
        where = f"cells[{i}]"
        if not isinstance(c, dict):
            raise ScenarioError(f"{where}: expected an object")
        cells.append((_addr(c, where), c.get("value", 0)))

    raw_programs = doc.get("programs", {})
    if isinstance(raw_programs, list):
        raw_programs = {str(i): p for i, p in enumerate(raw_programs)}
    if not isinstance(raw_programs, dict):
        raise ScenarioError("'programs' must map process index to a statement list")
    programs: list[list[Statement]] = [[] for _ in range(n)]
    for key, stmts in raw_programs.items():
        try:
            p = int(str(key).lstrip("P"))
        except ValueError:
            raise ScenarioError(f"programs: bad process key {key!r}") from None
        if not 0 <= p < n:
            raise ScenarioError(f"programs: process {p} out of range")
        for k, st in enumerate(stmts):
            where = f"programs[{key}][{k}]"
            if not isinstance(st, dict) or "op" not in st:
                raise ScenarioError(f"{where}: expected an object with an 'op' key")
            src = _addr(st["src"], where) if st.get("src") is not None else None
            dst = _addr(st["dst"], where) if st.get("dst") is not None else None
            programs[p].append(Statement(str(st["op"]), src, dst))

    sched_doc = doc.get("schedule", {"seed": 0})
    if not isinstance(sched_doc, dict) or len(sched_doc) != 1:
        raise ScenarioError("'schedule' must be {\"explicit\": [...]} or {\"seed\": N}")
    if "explicit" in sched_doc:
        order = sched_doc["explicit"]
        if not isinstance(order, list) or not all(isinstance(x, int) and not isinstance(x, bool) for x in order):
            raise ScenarioError("schedule.explicit must be a list of process indices")
        schedule: ExplicitSchedule | SeededSchedule = ExplicitSchedule(tuple(order))
    elif "seed" in sched_doc:
        seed = sched_doc["seed"]
        if not isinstance(seed, int) or isinstance(seed, bool):
            raise ScenarioError("schedule.seed must be an integer")
        schedule = SeededSchedule(seed)
    else:
        raise ScenarioError(f"unknown schedule kind {next(iter(sched_doc))!r}")

    return Scenario(
        n=n,
        cells=tuple(cells),
        programs=tuple(tuple(p) for p in programs),
        schedule=schedule,
        name=str(doc.get("name", name)),
    )


def parse_scenario(text: str, source: str = "<scenario>") -> Scenario:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioFileError(exc.msg, source, exc.lineno) from None
    try:
        return scenario_from_dict(doc, name=Path(source).stem)
    except ScenarioFileError:
        raise
    except ScenarioError as exc:
        msg = str(exc)
        line = None
        head = msg.split(":", 1)[0]
        if head.startswith(("cells[", "programs[")):
            line = _locate(text, f'"{head.split("[")[0]}"')
        raise ScenarioFileError(msg, source, line) from None


def load_scenario(path: str | Path) -> Scenario:
    path = Path(path)
    return parse_scenario(path.read_text(encoding="utf-8"), str(path))


def dump_scenario(s: Scenario) -> str:
    return json.dumps(s.to_dict(), indent=2) + "\n"


def golden_path(name: str) -> Path:
    """Path of a bundled scenario, e.g. ``golden_path("fig5a")``."""
    if name not in GOLDEN:
        raise KeyError(f"no bundled scenario {name!r}; have {', '.join(GOLDEN)}")
    return Path(str(resources.files("dsmrace").joinpath("scenarios", f"{name}.json")))


def load_golden(name: str) -> Scenario:
    return load_scenario(golden_path(name))
