"""Per-criterion PASS/FAIL summary for the acceptance suite."""

from collections import defaultdict

import pytest

_outcomes = defaultdict(list)
_titles = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number): acceptance criterion covered by the test")


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark:
            _titles[mark.args[0]] = getattr(item.module, "CRITERIA", {}).get(mark.args[0], "")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark and (report.when == "call" or report.failed):
        _outcomes[mark.args[0]].append((item.name, report.passed, report.skipped))


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_titles):
        results = _outcomes.get(number, [])
        if not results:
            verdict = "NOT RUN"
        elif all(passed for _, passed, _ in results):
            verdict = "PASS"
        else:
            verdict = "FAIL"
        failing = [name for name, passed, skipped in results if not passed]
        detail = f"  (failing: {', '.join(failing)})" if failing else ""
        terminalreporter.write_line(f"criterion {number:>2} {verdict:<7} {_titles[number]}{detail}")
