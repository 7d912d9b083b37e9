import pytest

_KEY = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_KEY] = []


@pytest.fixture
def acceptance_report(request):
    """Record one summary line per acceptance criterion."""
    lines = request.config.stash[_KEY]

    def record(number: int, title: str, ok: bool, detail: str) -> None:
        lines.append((number, f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {title}: {detail}"))

    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_KEY, [])
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(lines):
        terminalreporter.write_line(line)
