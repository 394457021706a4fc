import math

import pytest

from pdrmm.map_model import RouteMap, rectangle
from pdrmm.walk_sim import WalkScenario

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def grid_rectangle():
    """14 m x 7 m loop: every corner falls on a multiple of the 0.7 m step."""
    return rectangle(14.0, 7.0)


@pytest.fixture
def loop_rectangle():
    """37.5 m x 25 m loop, 125 m around."""
    return rectangle(37.5, 25.0)


@pytest.fixture
def acceptance_scenario():
    return WalkScenario(
        rectangle(45.0, 17.5, ccw=False),
        initial_heading_bias=math.radians(17.0),
        gyro_bias=math.radians(0.1),
        gyro_noise_std=0.005,
        accel_noise_std=0.2,
        seed=7,
    )


@pytest.fixture
def l_route():
    return RouteMap(((0.0, 0.0), (7.0, 0.0), (7.0, 7.0)))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
