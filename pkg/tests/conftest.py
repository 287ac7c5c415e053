import pytest

# filled by tests/test_acceptance.py, printed after the run
ACCEPTANCE = {}


def record(number: int, title: str, ok: bool, detail: str = "") -> None:
    prev = ACCEPTANCE.get(number)
    if prev is not None:
        ok = ok and prev[1]
        detail = "; ".join(x for x in (prev[2], detail) if x)
    ACCEPTANCE[number] = (title, ok, detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        title, ok, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {number:2d}. {title}  ({detail})")


@pytest.fixture
def record_criterion():
    return record
