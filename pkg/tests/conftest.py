import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_CRITERIA = {}


class CriterionReport:
    """Records one PASS/FAIL line per acceptance criterion."""

    def __init__(self, number, title):
        self.number, self.title = number, title
        self.details = []

    def note(self, text):
        self.details.append(text)

    def line(self, ok):
        status = "PASS" if ok else "FAIL"
        extra = f" ({'; '.join(self.details)})" if self.details else ""
        return f"criterion {self.number} [{status}] {self.title}{extra}"


@pytest.fixture
def criterion(request):
    marker = request.node.get_closest_marker("criterion")
    report = CriterionReport(*marker.args)
    yield report
    rep = getattr(request.node, "rep_call", None)
    ok = rep is not None and rep.passed
    _CRITERIA[report.number] = report.line(ok)
    print("\n" + report.line(ok))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for number in sorted(_CRITERIA):
            terminalreporter.write_line(_CRITERIA[number])
