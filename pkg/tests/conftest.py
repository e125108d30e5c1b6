import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from cache3d.models import ModelParams  # noqa: E402
from cache3d.optimizer import ConstraintSet, optimize  # noqa: E402


@pytest.fixture(scope="session")
def default_params():
    return ModelParams()


@pytest.fixture(scope="session")
def unconstrained_result(default_params):
    return optimize(default_params, ConstraintSet())


# -- acceptance reporting: one line per criterion in the terminal summary ----

_criteria = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    number, title = mark.args
    entry = _criteria.setdefault(number, {"title": title, "ok": True, "detail": ""})
    if rep.failed or (rep.skipped and rep.when == "call"):
        entry["ok"] = False
    details = [v for k, v in item.user_properties if k == "detail"]
    if details:
        entry["detail"] = details[-1]


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        e = _criteria[number]
        status = "PASS" if e["ok"] else "FAIL"
        detail = f" ({e['detail']})" if e["detail"] else ""
        terminalreporter.write_line(f"criterion {number}: {status}  {e['title']}{detail}")
