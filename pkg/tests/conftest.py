import pytest

_RESULTS: dict[int, tuple[str, bool, str]] = {}


@pytest.fixture
def criterion(request):
    """Record one acceptance criterion's outcome for the end-of-run summary."""
    marker = request.node.get_closest_marker("criterion")
    number, title = marker.args
    _RESULTS[number] = (title, False, "did not finish")
    details = []
    yield details
    _RESULTS[number] = (title, True, "; ".join(details))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker and report.failed:
        number, title = marker.args
        message = str(call.excinfo.value).splitlines()[0] if call.excinfo else report.when
        _RESULTS[number] = (title, False, message)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        title, ok, detail = _RESULTS[number]
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"[{status}] {number}. {title} -- {detail}")
