import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))  # make oracles importable

from qwsim import DensityMatrix, preset


@pytest.fixture(scope="session")
def fig2a_base():
    return preset("fig2a").base


@pytest.fixture
def ground():
    return DensityMatrix.ground_state()


def dm_from_matrix(m):
    """Upper-triangle DensityMatrix from a full 4x4 complex matrix."""
    return DensityMatrix(
        m[0, 0].real, m[1, 1].real, m[2, 2].real, m[3, 3].real,
        m[0, 1], m[0, 2], m[0, 3], m[1, 2], m[1, 3], m[2, 3])


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


#: verdict lines collected by the acceptance suite, echoed after the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
