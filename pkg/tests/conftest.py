"""Shared fixtures and the acceptance-criteria reporter.

Acceptance tests record one PASS/FAIL line per criterion; the lines are
echoed in a terminal section at the end of the run so they are visible
without -s.
"""

import pytest

_acceptance_lines = []


@pytest.fixture
def acceptance():
    """Record and print '[acceptance] <name>: PASS|FAIL' for one criterion."""

    def record(name: str, passed: bool) -> None:
        line = f"[acceptance] {name}: {'PASS' if passed else 'FAIL'}"
        _acceptance_lines.append(line)
        print(line)

    return record


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)
