import pytest

_VERDICTS: list = []


@pytest.fixture
def verdict():
    """Record one acceptance line; shown in the terminal summary."""
    def record(key, ok, detail, soft=False):
        tag = "PASS" if ok else ("NOTE" if soft else "FAIL")
        line = f"[{tag}] criterion {key}: {detail}"
        _VERDICTS.append(line)
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if _VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in _VERDICTS:
            terminalreporter.write_line(line)
