import numpy as np
import pytest
from hypothesis import settings

from artifact.pipeline import hofstadter

settings.register_profile("default", deadline=None, max_examples=25)
settings.load_profile("default")

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def hof12():
    return hofstadter(12, 12, 1, 3, filled_bands=1)


@pytest.fixture(scope="session")
def hof12_gap2():
    return hofstadter(12, 12, 1, 3, filled_bands=2)


@pytest.fixture(scope="session")
def hof24():
    return hofstadter(24, 24, 1, 3, filled_bands=1)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion")[1].split("(")[0])):
            terminalreporter.write_line(line)
