import pytest

from cmsr.model import Instance

from helpers import FIG1_RATES, fig1_travel

_acceptance_lines = []


@pytest.fixture
def fig1():
    return Instance(4, FIG1_RATES, fig1_travel(), penalty=100, route_len=4, fleet=2)


@pytest.fixture
def acceptance():
    def record(criterion, ok, detail=""):
        _acceptance_lines.append(f"[{'PASS' if ok else 'FAIL'}] criterion {criterion}: {detail}")
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)
