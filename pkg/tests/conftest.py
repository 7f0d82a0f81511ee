import math

import numpy as np
import pytest
from hypothesis import strategies as st

from advisorgame import BeliefParams, Scenario

# log-uniform precisions on [0.05, 20]
precisions = st.floats(math.log(0.05), math.log(20)).map(math.exp)
levels = st.floats(-10, 10)
adoption = st.floats(0, 1)
interior_adoption = st.floats(0.01, 0.99)


@st.composite
def scenarios(draw, p=adoption):
    beliefs = BeliefParams(draw(levels), draw(precisions), draw(precisions))
    return Scenario(beliefs, draw(p), draw(levels), draw(levels))


def rel_close(a, b, rel=1e-12, floor=1e-15):
    return abs(a - b) <= max(rel * max(abs(a), abs(b)), floor)


@pytest.fixture
def canonical():
    """p=0.5, rE=rP=1, mu0=0, r=1, sP=0."""
    return Scenario(BeliefParams(0.0, 1.0, 1.0), 0.5, 1.0, 0.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


# (criterion number, title, passed, detail); filled by test_acceptance.py
ACCEPTANCE_RESULTS = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num, title, passed, detail in sorted(ACCEPTANCE_RESULTS):
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{status}] AC{num:<2} {title}: {detail}")
