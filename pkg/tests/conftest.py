import pytest

from levy_extremum.levy_models import Brownian, BrownianParams, benchmark_kobol


@pytest.fixture(scope="session")
def kobol12():
    return benchmark_kobol(1.2)


@pytest.fixture(scope="session")
def kobol08():
    return benchmark_kobol(0.8)


@pytest.fixture(scope="session")
def bm():
    return Brownian(BrownianParams(sigma=1.0))


ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])
