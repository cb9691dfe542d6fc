import pytest

_RESULTS: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def criterion():
    """Record one acceptance outcome, then fail the test if it did not hold."""

    def record(cid: int, ok: bool, detail: str) -> None:
        _RESULTS[cid] = (bool(ok), detail)
        assert ok, f"criterion {cid}: {detail}"

    return record


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(_RESULTS):
        ok, detail = _RESULTS[cid]
        terminalreporter.write_line(f"criterion {cid:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
