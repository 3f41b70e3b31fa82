import numpy as np
import pytest

from parineq.rng import DistSpec, rng_new, sample_gamma

_ACCEPTANCE_LINES = []


@pytest.fixture
def report():
    """Record one acceptance criterion outcome; printed in the terminal summary."""

    def record(name, passed, detail=""):
        _ACCEPTANCE_LINES.append(f"[{'PASS' if passed else 'FAIL'}] {name}: {detail}")
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def gamma_draws():
    def make(n, shape=1.5, scale=1.0, seed=12345):
        return sample_gamma(rng_new(seed), DistSpec(shape, scale), n)

    return make


@pytest.fixture
def small_sample():
    return np.array([1.0, 2.0, 3.0, 4.0, 5.0])
