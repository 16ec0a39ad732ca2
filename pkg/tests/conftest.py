import pytest

_RESULTS = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    number, title = marker.args
    detail = "; ".join(str(v) for k, v in item.user_properties if k == "detail")
    failed = report.failed or (report.when == "call" and not report.passed)
    if report.when == "call" or failed:
        _RESULTS[number] = (title, "FAIL" if failed else "PASS", detail)


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        title, status, detail = _RESULTS[number]
        line = f"criterion {number:>2} {status}: {title}"
        terminalreporter.write_line(f"{line} [{detail}]" if detail else line)
