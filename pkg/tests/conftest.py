import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from spinfactor.algebra import SpinElement

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance_report():
    """Record one pass/fail line per acceptance criterion; printed in the terminal summary."""

    def record(label: str, passed: bool, detail: str = ""):
        line = f"[{'PASS' if passed else 'FAIL'}] {label}" + (f"  ({detail})" if detail else "")
        _ACCEPTANCE_LINES.append(line)
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


# ---------------------------------------------------------------------------
# hypothesis strategies

finite = st.floats(min_value=-3.0, max_value=3.0, allow_nan=False, allow_infinity=False)
dims = st.integers(min_value=1, max_value=6)


@st.composite
def elements(draw, d=None):
    d = draw(dims) if d is None else d
    v = draw(st.lists(finite, min_size=d, max_size=d))
    return SpinElement(v, draw(finite))


@st.composite
def element_pairs(draw):
    d = draw(dims)
    return draw(elements(d)), draw(elements(d))


@st.composite
def element_triples(draw):
    d = draw(dims)
    return draw(elements(d)), draw(elements(d)), draw(elements(d))


@st.composite
def states(draw, d=None, max_radius=0.5):
    d = draw(dims) if d is None else d
    g = np.array(draw(st.lists(st.floats(-1, 1, allow_nan=False), min_size=d, max_size=d)))
    n = np.linalg.norm(g)
    r = draw(st.floats(0.0, max_radius))
    v = np.zeros(d) if n < 1e-6 else r * g / n
    return SpinElement(v, 0.5)


@st.composite
def state_pairs(draw, max_radius=0.5):
    d = draw(dims)
    return draw(states(d, max_radius)), draw(states(d, max_radius))


seeds = st.integers(min_value=0, max_value=2**32 - 1)
