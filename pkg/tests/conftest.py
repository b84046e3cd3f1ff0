import json
from pathlib import Path

import pytest

from biasaudit.core import default_lexicons
from biasaudit.ingest import load_word_list

DATA_DIR = Path(__file__).parent / "data"
PACKAGE_DATA = Path(__file__).parent.parent / "src" / "biasaudit" / "data"


@pytest.fixture(scope="session")
def lexicons():
    return default_lexicons()


@pytest.fixture(scope="session")
def stop_words():
    return frozenset(load_word_list(PACKAGE_DATA / "stopwords.txt"))


@pytest.fixture(scope="session")
def cobs_corpus():
    text = (DATA_DIR / "cobs_corpus.txt").read_text(encoding="utf-8")
    return [line for line in text.splitlines() if line.strip()]


@pytest.fixture(scope="session")
def fixture_targets():
    return load_word_list(DATA_DIR / "neutral_words_fixture.txt")


@pytest.fixture(scope="session")
def tokenizer_cases():
    return json.loads((DATA_DIR / "tokenizer_cases.json").read_text(encoding="utf-8"))


def write_jsonl(path, rows):
    with open(path, "w", encoding="utf-8") as handle:
        for row in rows:
            handle.write(json.dumps(row, ensure_ascii=False) + "\n")
    return path
