import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from firstarrival.blocking import BooleanModelParams
from firstarrival.geometry import TestLink

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

_ACCEPTANCE_LINES = []


def record_acceptance(line: str) -> None:
    """Queue a pass/fail line for the terminal summary."""
    _ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def street_model():
    """Mid-density field of small reflectors used for most checks."""
    return BooleanModelParams.from_field_units(60, (10, 40, 4), (10, 80, 8))


@pytest.fixture(scope="session")
def street_link():
    return TestLink(350)


@pytest.fixture(scope="session")
def single_orientation_model():
    return BooleanModelParams.from_field_units(30, (10, 40, 4), (60, 60, 1))


def deg(x):
    return math.radians(x)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
