import pytest

_results = pytest.StashKey[dict]()


def pytest_configure(config):
    config.stash[_results] = {}


@pytest.fixture
def acceptance(request):
    """Record one criterion's outcome for the end-of-run summary."""
    store = request.config.stash[_results]

    def record(number, ok, detail):
        store[number] = (ok, detail)

    return record


def pytest_terminal_summary(terminalreporter, config):
    store = config.stash.get(_results, {})
    if not store:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(store):
        ok, detail = store[number]
        terminalreporter.write_line(f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
