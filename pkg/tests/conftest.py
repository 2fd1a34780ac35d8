import pytest

import helpers


@pytest.fixture(scope="session")
def xor_dist():
    return helpers.xor_distribution()


@pytest.fixture(scope="session")
def copy_dist():
    return helpers.copy_distribution()


def pytest_terminal_summary(terminalreporter):
    if helpers.ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in helpers.ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
