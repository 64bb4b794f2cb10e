import mpmath
import pytest


@pytest.fixture(autouse=True)
def _reference_precision():
    # mpf arithmetic in tests (differences against references) runs at 40 digits
    with mpmath.workdps(40):
        yield


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import REPORT

    if REPORT:
        terminalreporter.section("acceptance criteria")
        for line in sorted(REPORT):
            terminalreporter.write_line(line)
