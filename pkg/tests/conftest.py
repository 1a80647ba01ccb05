from __future__ import annotations

import numpy as np
import pytest
from hypothesis import settings

from stoclock.clock import ClockGrid
from stoclock.qcore import TwoLevelParams, pure_state, two_level_model

settings.register_profile("stoclock", max_examples=40, deadline=None)
settings.load_profile("stoclock")

# filled by tests/test_acceptance.py, printed once at the end of the session
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def params():
    return TwoLevelParams(omega=1.0, gamma=0.2)


@pytest.fixture
def model(params):
    return two_level_model(params)


@pytest.fixture
def psi0():
    return pure_state(1, 1)


@pytest.fixture
def grid():
    return ClockGrid(1.0, 0.05, 2)


def random_state(rng: np.random.Generator, d: int = 2) -> np.ndarray:
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return v / np.linalg.norm(v)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
