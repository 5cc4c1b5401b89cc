import os
from collections import defaultdict
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", deadline=None, suppress_health_check=[HealthCheck.too_slow], print_blob=True
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

DATA = Path(__file__).resolve().parent.parent / "data"

_outcomes: dict = defaultdict(list)
_titles: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion covered by the test")


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    n, title = marker.args
    _titles[n] = title
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _outcomes[n].append((item.name, report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_outcomes):
        results = _outcomes[n]
        ok = all(o == "passed" for _, o in results)
        status = "PASS" if ok else "FAIL"
        failed = [name for name, o in results if o != "passed"]
        extra = f" (failed: {', '.join(failed)})" if failed else ""
        terminalreporter.write_line(f"criterion {n} {status}: {_titles[n]} [{len(results)} tests]{extra}")
