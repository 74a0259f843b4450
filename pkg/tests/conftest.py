import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

ACCEPTANCE = {}


@pytest.fixture
def criterion(request):
    """Record the outcome of one acceptance criterion for the summary block."""
    holder = {}

    def start(number, title):
        holder["key"] = (number, title)

    yield start
    rep = getattr(request.node, "rep_call", None)
    if "key" in holder:
        ACCEPTANCE[holder["key"]] = bool(rep is not None and rep.passed)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for (number, title), ok in sorted(ACCEPTANCE.items()):
        terminalreporter.write_line(f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {title}")
