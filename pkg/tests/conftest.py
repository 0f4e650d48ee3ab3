from pathlib import Path

import pytest

from gasflow.conllu import parse_conllu
from gasflow.wordnet import load_wordnet

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def sense_index():
    with open(FIXTURES / "wordnet" / "index.sense") as sense, open(
        FIXTURES / "wordnet" / "lexnames"
    ) as lex:
        return load_wordnet(sense, lex)


@pytest.fixture(scope="session")
def motivating_sentences():
    with open(FIXTURES / "motivating.conllu") as fh:
        return parse_conllu(fh)


@pytest.fixture(scope="session")
def annotated_20():
    with open(FIXTURES / "annotated_20.conllu") as fh:
        return parse_conllu(fh)
