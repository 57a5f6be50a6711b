import pytest

_LINES: list = []


@pytest.fixture
def acceptance_line():
    """Record one ``PASS|FAIL  criterion  detail`` line; printed again in the terminal summary."""
    def record(number: int, ok: bool, detail: str):
        line = f"[criterion {number}] {'PASS' if ok else 'FAIL'}  {detail}"
        print(line)
        _LINES.append(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance")
        for line in sorted(_LINES):
            terminalreporter.write_line(line)
