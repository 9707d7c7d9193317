import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from budgetmatch.instances import example1  # noqa: E402

DATA = Path(__file__).parent / "data"

# criterion number -> (title, passed so far)
CRITERIA: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or not (rep.when == "call" or rep.failed):
        return
    n, title = mark.args
    ok = CRITERIA.get(n, (title, True))[1] and rep.passed
    CRITERIA[n] = (title, ok)


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(CRITERIA):
        title, ok = CRITERIA[n]
        terminalreporter.write_line(f"CRITERION {n:>2} {'PASS' if ok else 'FAIL'}: {title}")


@pytest.fixture
def ex1():
    return example1()


@pytest.fixture
def data_dir():
    return DATA
