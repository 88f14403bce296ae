import sys
from pathlib import Path

import pytest

HERE = Path(__file__).parent
sys.path.insert(0, str(HERE))

from nlpabs.sampling import seed_from_env  # noqa: E402

CORPUS = HERE / "corpus"
FIXTURES = HERE / "fixtures"
CORPUS_PROGRAMS = sorted(CORPUS.glob("*.pl"))


def read(path) -> str:
    return Path(path).read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def seed():
    return seed_from_env()


def pytest_terminal_summary(terminalreporter):
    lines = sys.modules.get("test_acceptance")
    results = getattr(lines, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for line in results:
            terminalreporter.write_line(line)
