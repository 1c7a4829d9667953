import numpy as np
import pytest
from hypothesis import settings

from saddlemin import bank

settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile("default")


@pytest.fixture
def quad1d():
    return bank.quad1d()


@pytest.fixture
def quad2d():
    return bank.quad2d_c34()


@pytest.fixture
def finite3():
    return bank.finite3()


def approx_vec(actual, expected, tol):
    return np.max(np.abs(np.asarray(actual, float) - np.asarray(expected, float))) <= tol


# Acceptance outcomes, keyed by criterion number; filled in by test_acceptance.
CRITERIA: dict[int, list[tuple[bool, str]]] = {}


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(CRITERIA):
        parts = CRITERIA[number]
        ok = all(p for p, _ in parts)
        detail = "; ".join(d for _, d in parts)
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
