import pytest

_ACCEPTANCE_LINES = []


@pytest.fixture
def report_criterion():
    """Record a one-line PASS/FAIL verdict for an acceptance criterion."""
    def _report(number, title, ok, detail=""):
        line = f"[{'PASS' if ok else 'FAIL'}] AC{number:02d} {title}"
        if detail:
            line += f" ({detail})"
        _ACCEPTANCE_LINES.append(line)
        print(line)
        return ok
    return _report


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
