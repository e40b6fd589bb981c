import pytest

_verdicts: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def verdict():
    """Record and print one PASS/FAIL line for an acceptance criterion."""
    def record(number: int, ok: bool, detail: str) -> bool:
        _verdicts[number] = (ok, detail)
        print(f"\ncriterion {number}: {'PASS' if ok else 'FAIL'} ({detail})")
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if not _verdicts:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_verdicts):
        ok, detail = _verdicts[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'} ({detail})")
