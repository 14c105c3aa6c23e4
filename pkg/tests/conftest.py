import hypothesis.strategies as st
import pytest

from dsmrace import VectorClock


def clocks(n: int, max_value: int = 6):
    return st.lists(st.integers(0, max_value), min_size=n, max_size=n).map(VectorClock.of)


@st.composite
def clock_tuple(draw, k: int, max_value: int = 4):
    """``k`` clocks of one shared random length; small values so orderings collide often."""
    n = draw(st.integers(1, 4))
    return tuple(draw(clocks(n, max_value)) for _ in range(k))


@pytest.fixture
def criterion(capsys):
    """Print one PASS/FAIL line per acceptance criterion, even without ``-s``."""

    def record(label: str, ok: bool, detail: str = "") -> None:
        with capsys.disabled():
            status = "PASS" if ok else "FAIL"
            print(f"\n[{status}] {label}" + (f" :: {detail}" if detail else ""))
        assert ok, f"{label}: {detail}"

    return record


def corpus(count: int, seed: int, read_only: bool = False, max_statements: int = 12):
    """A reproducible list of random scenarios."""
    import random

    from dsmrace.generate import random_scenario

    rng = random.Random(seed)
    return [random_scenario(rng, max_statements=max_statements, read_only=read_only) for _ in range(count)]
