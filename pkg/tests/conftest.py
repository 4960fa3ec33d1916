import math

import numpy as np
import pytest

TOL = 1e-12


def malus(phi, alpha):
    """Single-photon transmission through the + port: cos^2 of the angle difference."""
    return math.cos(phi - alpha) ** 2


def brute_force_probability(rho, alpha_a, alpha_b, x, y):
    """Born rule written out with explicit kets, independent of the package code."""
    kets = {
        "+": lambda a: np.array([math.cos(a), math.sin(a)]),
        "-": lambda a: np.array([math.sin(a), -math.cos(a)]),
    }
    v = np.kron(kets[x](alpha_a), kets[y](alpha_b))
    return float(np.real(v.conj() @ np.asarray(rho) @ v))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


_ACCEPTANCE = []


@pytest.fixture
def criterion(request):
    """Record one acceptance line; call with (ok, detail) and the test asserts ``ok``."""

    def record(number, title, ok, detail=""):
        _ACCEPTANCE.append((number, title, bool(ok), detail))
        assert ok, f"criterion {number} ({title}) failed: {detail}"

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, ok, detail in _ACCEPTANCE:
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {number}. {title}: {detail}")
