import pytest

from hardyrellich.green import green_window

# acceptance lines collected during the run, printed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def desk_green():
    """The d = 3, R = 48, N = 2048 Green table (about 15 s to build)."""
    return green_window(3, 48, 2048)


@pytest.fixture(scope="session")
def small_green():
    return green_window(3, 16, 256)


@pytest.fixture
def acceptance():
    def record(number: int, title: str, passed: bool, detail: str = "") -> None:
        line = f"[acceptance {number:>2}] {'PASS' if passed else 'FAIL'}  {title}"
        if detail:
            line += f"  ({detail})"
        ACCEPTANCE_LINES.append(line)
        print(line)
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
