"""Shared helpers plus the acceptance summary printed after a run.

Tests marked ``@pytest.mark.criterion(n, title)`` feed one PASS/FAIL line
per criterion number into the terminal summary, so the acceptance status
is readable at a glance even inside a long -v log.
"""

from __future__ import annotations

import pytest


def pytest_configure(config):
    config.addinivalue_line(
        "markers",
        "criterion(number, title): ties a test to a numbered acceptance criterion",
    )


_CRITERIA: dict[int, dict] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    entry = _CRITERIA.setdefault(
        number, {"title": title, "ok": True, "tests": 0, "failed": 0}
    )
    if report.when == "call":
        entry["tests"] += 1
        if report.outcome != "passed":
            entry["ok"] = False
            entry["failed"] += 1
    elif report.outcome == "failed":  # setup/teardown error
        entry["ok"] = False
        entry["failed"] += 1


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        entry = _CRITERIA[number]
        status = "PASS" if entry["ok"] and entry["tests"] else "FAIL"
        terminalreporter.write_line(
            f"criterion {number}: {status} - {entry['title']}"
            f" ({entry['tests'] - entry['failed']}/{entry['tests']} checks)"
        )
