import pytest

_criteria: list[tuple[str, bool, str]] = []


class _Recorder:
    def __init__(self, name):
        self.name = name
        self.detail = ""


@pytest.fixture
def criterion(request):
    """Record one acceptance criterion's outcome for the end-of-run summary."""
    name = request.node.get_closest_marker("criterion").args[0]
    rec = _Recorder(name)
    yield rec
    passed = request.node.rep_call.passed if hasattr(request.node, "rep_call") else False
    _criteria.append((name, passed, rec.detail))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(name): acceptance criterion")


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in _criteria:
        line = f"{'PASS' if passed else 'FAIL'}  {name}"
        terminalreporter.write_line(line + (f"  ({detail})" if detail else ""))
