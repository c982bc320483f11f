import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from massmin.nonlinearity import single_power
from massmin.radial import RadialGrid

settings.register_profile(
    "massmin", deadline=None, max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("massmin")


@pytest.fixture(scope="session")
def cubic():
    return single_power(4)


@pytest.fixture(scope="session")
def grid1():
    return RadialGrid(1, 20.0, 4000)


def sech_soliton(mu):
    """Closed-form ground state of -u'' + mu u = u^3 on the line."""
    k = np.sqrt(mu)
    return lambda x: np.sqrt(2 * mu) / np.cosh(k * x)


# one line per acceptance criterion, appended by tests/test_acceptance.py
ACCEPTANCE_LINES: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])
