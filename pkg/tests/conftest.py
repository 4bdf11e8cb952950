from __future__ import annotations

from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"

# criterion label -> list of (nodeid, passed)
_criterion_results: dict[str, list[tuple[str, bool]]] = {}


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "criterion(name): acceptance criterion this test asserts"
    )


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


def pytest_runtest_logreport(report):
    if report.when != "call":
        return
    marker_name = getattr(report, "_criterion", None)
    if marker_name:
        _criterion_results.setdefault(marker_name, []).append(
            (report.nodeid, report.passed)
        )


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker:
        report._criterion = marker.args[0]


def pytest_terminal_summary(terminalreporter):
    if not _criterion_results:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_criterion_results):
        results = _criterion_results[name]
        ok = all(passed for _, passed in results)
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"[{status}] {name} ({len(results)} checks)")
