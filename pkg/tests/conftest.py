import pytest

from continlab import CheckConfig, run_corpus

# light config for unit tests; acceptance criteria use the defaults
LIGHT = CheckConfig(grid_resolution=61, lambda_resolution=101, sample_count=120)


@pytest.fixture
def light():
    return LIGHT


@pytest.fixture(scope="session")
def default_corpus():
    return run_corpus(CheckConfig())


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
