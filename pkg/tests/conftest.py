from pathlib import Path

import pytest
from hypothesis import settings

settings.register_profile("repo", derandomize=True, deadline=None, max_examples=40)
settings.load_profile("repo")

DATA = Path(__file__).resolve().parent.parent / "data"

# lines appended by test_acceptance, echoed after the run
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def data_dir() -> Path:
    return DATA


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
