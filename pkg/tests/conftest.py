from pathlib import Path

import pytest

from dip.lexicon import Lexicon, LexiconEntry

TESTS = Path(__file__).resolve().parent
FIXTURES = TESTS / "fixtures"
BUNDLED = TESTS.parent / "src" / "dip" / "fixtures"

# one line per acceptance criterion, printed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def fixtures_dir():
    return FIXTURES


@pytest.fixture
def bundled_dir():
    return BUNDLED


@pytest.fixture
def small_lexicon():
    return Lexicon(
        "bug_Latn",
        [
            LexiconEntry("bola", "ball"),
            LexiconEntry("bola api", "fireball"),
            LexiconEntry("naik", "rise (go up)"),
            LexiconEntry("tello'", "egg"),
        ],
    )
