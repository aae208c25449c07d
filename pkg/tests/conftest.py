import numpy as np
import pytest
from scipy.ndimage import gaussian_filter

from oracles import sphere_image

_ACCEPTANCE_LINES = []


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def blurred_noise():
    def make(H, sigma=2.0, seed=0):
        r = np.random.default_rng(seed)
        return gaussian_filter(r.random((H, 2 * H)), sigma, mode="wrap")
    return make


@pytest.fixture
def sphere_fixture():
    return sphere_image


@pytest.fixture
def report():
    """Collect one pass/fail line per acceptance criterion for the terminal summary."""
    def add(line):
        _ACCEPTANCE_LINES.append(line)
        print(line)
    return add


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
