"""Collects acceptance outcomes and prints one PASS/FAIL line per criterion."""
import pytest

_OUTCOMES = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when not in ("setup", "call"):
        return
    n = marker.args[0]
    if report.when == "setup" and report.passed:
        return
    detail = dict(item.user_properties).get("detail", "")
    if report.failed:
        msg = str(report.longrepr.reprcrash.message) if hasattr(report.longrepr, "reprcrash") else ""
        detail = f"{detail}  [{msg.splitlines()[0] if msg else 'error'}]".strip()
    _OUTCOMES[n] = ("PASS" if report.passed else "FAIL", detail)


def pytest_terminal_summary(terminalreporter):
    if not _OUTCOMES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_OUTCOMES):
        status, detail = _OUTCOMES[n]
        terminalreporter.write_line(f"criterion {n:2d}: {status}  {detail}")
