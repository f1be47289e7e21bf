import pytest

from bspf._accel import BACKEND

# One line per acceptance criterion, filled in by tests/test_acceptance.py.
ACCEPTANCE: dict = {}


@pytest.fixture
def report():
    def record(number: int, passed: bool, detail: str):
        ACCEPTANCE[number] = (passed, detail)
        line = f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}"
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k}: {'PASS' if passed else 'FAIL'}  {detail}")
    terminalreporter.write_line(f"(kernel backend: {BACKEND})")
