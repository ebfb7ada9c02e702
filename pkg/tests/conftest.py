"""Shared pytest wiring: one summary line per acceptance check."""

import pytest

_LINES = []


@pytest.fixture(scope="session")
def acceptance():
    """Record a named acceptance check, then assert it."""

    def record(name, ok, detail):
        _LINES.append((name, bool(ok), detail))
        assert ok, f"{name}: {detail}"

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _LINES:
        return
    terminalreporter.write_sep("=", "acceptance summary")
    for name, ok, detail in _LINES:
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"[acceptance] {name}: {status} - {detail}")
