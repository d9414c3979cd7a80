import json
from pathlib import Path

import pytest

from modgate.corpus import load_corpus
from modgate.promptkit import bundled_spec_dir, load_spec_store
from modgate.taxonomy import default_taxonomy

FIXTURES = Path(__file__).resolve().parents[1] / "src" / "modgate" / "data" / "fixtures"

# filled by tests/test_acceptance.py, printed after the run
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def taxonomy():
    return default_taxonomy()


@pytest.fixture(scope="session")
def specs(taxonomy):
    return load_spec_store(bundled_spec_dir(), taxonomy)


@pytest.fixture(scope="session")
def fixtures_dir():
    return FIXTURES


@pytest.fixture(scope="session")
def eval_corpus(taxonomy):
    return load_corpus(FIXTURES / "eval_corpus.jsonl", taxonomy)


def write_jsonl(path: Path, records) -> Path:
    path.write_text("".join(json.dumps(r, ensure_ascii=False) + "\n" for r in records), encoding="utf-8")
    return path


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
