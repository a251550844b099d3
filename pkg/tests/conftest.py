import numpy as np
import pytest

from barrierkit.geometry import Polytope
from barrierkit.scenarios import steiner_barrier, unit_square


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def square():
    return unit_square()


@pytest.fixture
def cube():
    return Polytope([[x, y, z] for x in (-.5, .5) for y in (-.5, .5) for z in (-.5, .5)])


@pytest.fixture
def steiner():
    return steiner_barrier()


def pytest_terminal_summary(terminalreporter):
    from acceptance_log import LINES

    if LINES:
        terminalreporter.section("acceptance criteria")
        for line in LINES:
            terminalreporter.write_line(line)
