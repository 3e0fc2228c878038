import numpy as np
import pytest

from qdet import _backend, bayes, information, linalg, unambiguous
from qdet.sic import sic_qubit

_USERS = (bayes, information, linalg, unambiguous)


@pytest.fixture(params=sorted(_backend.available_backends()))
def backend(request, monkeypatch):
    """Run the test once per available kernel backend."""
    mod = _backend.available_backends()[request.param]
    for user in _USERS:
        monkeypatch.setattr(user, "kernels", mod)
    return mod


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def sic():
    return sic_qubit(1.0).povm


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion reported in the summary")
    config._criteria = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or report.when not in ("setup", "call"):
        return
    number, title = mark.args
    if report.when == "call" or report.failed:
        item.config._criteria[number] = (title, report.passed and report.when == "call")


def pytest_terminal_summary(terminalreporter, config):
    criteria = getattr(config, "_criteria", {})
    if not criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(criteria):
        title, passed = criteria[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if passed else 'FAIL'}  {title}")
