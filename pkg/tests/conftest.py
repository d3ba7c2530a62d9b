"""Shared fixtures: a session-wide census cache and the acceptance report.

The acceptance tests register one line per criterion; the terminal-summary
hook prints them as a block at the end of the run so the report is visible
regardless of output capturing.
"""

from __future__ import annotations

import pytest

from orbit_census import best_census

_ACCEPTANCE_LINES: dict[int, str] = {}


@pytest.fixture(scope="session")
def census_cache():
    """Memoized best-engine censuses shared across tests (the n=70..90
    tables take seconds each; nothing mutates a CensusTable)."""
    cache = {}

    def get(n: int, p: int):
        key = (n, p)
        if key not in cache:
            cache[key] = best_census(n, p)
        return cache[key]

    return get


class _Recorder:
    @staticmethod
    def record(criterion: int, passed: bool, detail: str) -> None:
        word = "PASS" if passed else "FAIL"
        _ACCEPTANCE_LINES[criterion] = f"criterion {criterion:2d}: {word} — {detail}"


@pytest.fixture()
def acceptance_report():
    return _Recorder()


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_ACCEPTANCE_LINES):
        terminalreporter.write_line(_ACCEPTANCE_LINES[k])
