import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from semiring_mt.demos import load_data, load_interp  # noqa: E402

_CRITERIA: dict[int, list[str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    for n in getattr(report, "criteria", ()):
        _CRITERIA.setdefault(n, []).append(report.outcome)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    rep.criteria = tuple(m.args[0] for m in item.iter_markers("criterion"))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        outcomes = _CRITERIA[n]
        ok = all(o == "passed" for o in outcomes)
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'} ({len(outcomes)} checks)")


@pytest.fixture(scope="session")
def data():
    return load_data


@pytest.fixture(scope="session")
def interp():
    return load_interp
