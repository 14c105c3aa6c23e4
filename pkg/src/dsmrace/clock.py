"""Immutable vector clocks.

A clock is a fixed-length tuple of non-negative event counters, one per
process.  Clocks are values: every operation returns a new clock.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Sequence


class ClockError(ValueError):
    """Structural misuse of clocks (length mismatch, bad index)."""


class ClockOrdering(enum.Enum):
    BEFORE = "before"
    AFTER = "after"
    EQUAL = "equal"
    CONCURRENT = "concurrent"

    def inverse(self) -> ClockOrdering:
        if self is ClockOrdering.BEFORE:
            return ClockOrdering.AFTER
        if self is ClockOrdering.AFTER:
            return ClockOrdering.BEFORE
        return self


@dataclass(frozen=True, slots=True)
class VectorClock:
    entries: tuple[int, ...]

    def __post_init__(self) -> None:
        if not isinstance(self.entries, tuple):
            object.__setattr__(self, "entries", tuple(self.entries))
        for x in self.entries:
            if not isinstance(x, int) or isinstance(x, bool) or x < 0:
                raise ClockError(f"clock entries must be non-negative ints, got {self.entries!r}")

    @classmethod
    def zero(cls, n: int) -> VectorClock:
        if n < 1:
            raise ClockError("a clock needs at least one component")
        return cls((0,) * n)

    @classmethod
    def of(cls, values: Iterable[int]) -> VectorClock:
        return cls(tuple(values))

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, i: int) -> int:
        return self.entries[i]

    def __iter__(self):
        return iter(self.entries)

    def __le__(self, other: VectorClock) -> bool:
        _check_same_length(self, other)
        return all(a <= b for a, b in zip(self.entries, other.entries))

    def __lt__(self, other: VectorClock) -> bool:
        return self <= other and self.entries != other.entries

    def __ge__(self, other: VectorClock) -> bool:
        return other <= self

    def __gt__(self, other: VectorClock) -> bool:
        return other < self

    def to_list(self) -> list[int]:
        return list(self.entries)

    def __str__(self) -> str:
        return "[" + ",".join(str(x) for x in self.entries) + "]"

    def __repr__(self) -> str:
        return f"VectorClock({self.to_list()})"


def _check_same_length(a: VectorClock, b: VectorClock) -> None:
    if len(a.entries) != len(b.entries):
        raise ClockError(f"clock length mismatch: {len(a.entries)} vs {len(b.entries)}")


def compare_clocks(a: VectorClock, b: VectorClock) -> ClockOrdering:
    """Order two clocks under the componentwise partial order.

    ``BEFORE`` means ``a <= b`` with ``a != b``; ``CONCURRENT`` means
    neither clock dominates the other.
    """
    _check_same_length(a, b)
    le = ge = True
    for x, y in zip(a.entries, b.entries):
        if x < y:
            ge = False
        elif x > y:
            le = False
    if le and ge:
        return ClockOrdering.EQUAL
    if le:
        return ClockOrdering.BEFORE
    if ge:
        return ClockOrdering.AFTER
    return ClockOrdering.CONCURRENT


def max_clock(a: VectorClock, b: VectorClock) -> VectorClock:
    """Componentwise maximum, the least upper bound of ``a`` and ``b``."""
    _check_same_length(a, b)
    return VectorClock(tuple(max(x, y) for x, y in zip(a.entries, b.entries)))


def max_clocks(first: VectorClock, *rest: VectorClock) -> VectorClock:
    out = first
    for c in rest:
        out = max_clock(out, c)
    return out


def increment(c: VectorClock, i: int) -> VectorClock:
    if not 0 <= i < len(c.entries):
        raise ClockError(f"process index {i} out of range for clock of length {len(c.entries)}")
    e = list(c.entries)
    e[i] += 1
    return VectorClock(tuple(e))


def as_clock(value: VectorClock | Sequence[int]) -> VectorClock:
    if isinstance(value, VectorClock):
        return value
    return VectorClock(tuple(value))
