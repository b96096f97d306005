import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # for synth.py

from curalog.corpus import ingest_tickets

FIXTURES = Path(__file__).parent / "fixtures"

# one line per release-gate criterion, filled in by tests/test_acceptance.py
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def small_corpus():
    with open(FIXTURES / "tickets_small.jsonl", encoding="utf-8") as f:
        report = ingest_tickets(f)
    assert not report.errors
    return report.corpus
