from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"
DOCS = FIXTURES / "documents"
LOGS = FIXTURES / "logs"

_criteria: dict[object, list[bool]] = {}
_elapsed: dict[object, float] = {}
_titles: dict[object, str] = {}


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark:
            _titles.setdefault(mark.args[0], mark.args[1] if len(mark.args) > 1 else "")
            item.user_properties.append(("criterion", mark.args[0]))


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    for name, value in report.user_properties:
        if name == "criterion":
            _criteria.setdefault(value, []).append(report.passed)
            _elapsed[value] = _elapsed.get(value, 0.0) + report.duration


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria, key=lambda k: (isinstance(k, str), str(k))):
        verdict = "PASS" if all(_criteria[n]) else "FAIL"
        terminalreporter.write_line(f"criterion {n} [{verdict}] {_titles.get(n, '')} ({_elapsed[n]:.2f}s)")


@pytest.fixture
def doc_text():
    def read(name: str) -> str:
        return (DOCS / name).read_text("utf-8")
    return read


@pytest.fixture
def log_text():
    def read(name: str) -> str:
        return (LOGS / name).read_text("utf-8")
    return read
