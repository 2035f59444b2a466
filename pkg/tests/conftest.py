import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from ssdwt import SampleGrid

settings.register_profile("ci", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("ci")

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_grid(rng, h, w, bit_depth=8):
    return SampleGrid.from_array(rng.integers(0, 1 << bit_depth, (h, w)), bit_depth)
