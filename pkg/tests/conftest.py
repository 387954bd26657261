import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("chevlab", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("chevlab")

ACCEPTANCE_LINES = []


@pytest.fixture
def criterion():
    """Record one PASS/FAIL line; the test still asserts on its own."""
    def record(number, ok, note=""):
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {note}".rstrip()
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance")
        for line in sorted(ACCEPTANCE_LINES, key=lambda l: int(l.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
