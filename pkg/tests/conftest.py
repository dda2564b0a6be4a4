import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from torsionlab.action import cubic_profile, hamiltonian_isotopy
from torsionlab.maps import DoubleShear, RotationIsotopy, linear_shear

settings.register_profile("torsionlab", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("torsionlab")


@pytest.fixture
def double_shear():
    return DoubleShear(1.0, 1.0)


@pytest.fixture
def cubic_flow():
    return hamiltonian_isotopy(cubic_profile())


_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.fixture
def report(request):
    """Attach a one-line summary to the criterion run by the requesting test."""
    marker = request.node.get_closest_marker("criterion")

    def note(text):
        _CRITERIA.setdefault(marker.args[0], {})["detail"] = text

    return note


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or rep.when not in ("setup", "call"):
        return
    if rep.when == "setup" and rep.passed:
        return
    entry = _CRITERIA.setdefault(marker.args[0], {})
    entry["title"] = marker.args[1]
    entry["passed"] = rep.passed
    if rep.failed:
        entry["detail"] = str(rep.longrepr.reprcrash.message if hasattr(rep.longrepr, "reprcrash")
                              else rep.longrepr).splitlines()[0]


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_CRITERIA):
        e = _CRITERIA[k]
        status = "PASS" if e.get("passed") else "FAIL"
        terminalreporter.write_line(f"[{status}] {k:2d}. {e.get('title', '')}: {e.get('detail', '')}")
