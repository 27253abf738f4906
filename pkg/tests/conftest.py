"""Collects acceptance verdicts and prints one line per criterion."""

import pytest

_VERDICTS = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    if report.when == "setup":
        # module fixtures can carry the expensive part of a criterion
        _VERDICTS[number] = (title, report.passed, report.duration)
    elif report.when == "call":
        _VERDICTS[number] = (title, report.passed, _VERDICTS[number][2] + report.duration)


def pytest_terminal_summary(terminalreporter):
    if not _VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_VERDICTS):
        title, passed, seconds = _VERDICTS[number]
        verdict = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"criterion {number:2d} {verdict}  {title}  ({seconds:.1f} s)")
