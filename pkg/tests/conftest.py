import sys

import numpy as np
import pytest

from scarcechain.config import load_scenario
from scarcechain.solver import solve


@pytest.fixture(scope="session")
def ex11():
    return load_scenario("example_1_1")


@pytest.fixture(scope="session")
def ex11_solution(ex11):
    return solve(ex11.model, ex11.solver)


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
