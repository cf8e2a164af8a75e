"""Shared fixtures; collects acceptance one-liners for the terminal summary."""

import pytest

_ACCEPT: list[str] = []


@pytest.fixture
def criterion_recorder():
    """Append one 'criterion N [PASS|FAIL] ...' line to the summary block."""
    return _ACCEPT.append


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPT:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(_ACCEPT):
        terminalreporter.write_line(line)
