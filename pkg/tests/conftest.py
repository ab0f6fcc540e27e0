import functools

import pytest
from hypothesis import HealthCheck, settings

from rieszlab.multiplier import hardy_section, make_sequence
from rieszlab.weights import WeightSpec, fourier_coeffs

settings.register_profile(
    "default", max_examples=25, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

STEP = WeightSpec.piecewise_step((1.0, 2.0), (0.0,))


@functools.lru_cache(maxsize=None)
def table(w: WeightSpec, K: int):
    """Fourier table, shared across tests."""
    return fourier_coeffs(w, K)


@functools.lru_cache(maxsize=None)
def section(w: WeightSpec, M: int):
    return hardy_section(table(w, M), M)


@functools.lru_cache(maxsize=None)
def gauss(length: int = 256, c: float = 1.0):
    return make_sequence("gauss", length=length, c=c)


@pytest.fixture
def step_weight():
    return STEP


# Lines recorded by the acceptance module, echoed after the run.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
