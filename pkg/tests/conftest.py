import numpy as np
import pytest

# Acceptance tests carry a (number, title) criterion marker; the hooks
# below print one PASS/FAIL line per criterion in the terminal summary
# regardless of output capture.  A criterion backed by several tests fails
# if any of them fails.

_RESULTS = {}


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "criterion(num, title): acceptance criterion metadata")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        report.criterion = marker.args


def pytest_runtest_logreport(report):
    crit = getattr(report, "criterion", None)
    if crit is None or report.when != "call":
        return
    num, title = crit
    outcome = "PASS" if report.passed else "FAIL"
    if _RESULTS.get(num, ("", "PASS"))[1] != "FAIL":
        _RESULTS[num] = (title, outcome)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_RESULTS):
        title, outcome = _RESULTS[num]
        terminalreporter.write_line(f"criterion {num} ({title}): {outcome}")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
