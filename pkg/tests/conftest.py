import pytest

# one line per acceptance criterion, echoed in the terminal summary so
# the verdicts survive output capturing
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def record():
    def _record(line: str) -> None:
        print(line)
        ACCEPTANCE_LINES.append(line)
    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
