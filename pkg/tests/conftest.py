import pytest

from biolit.annotator import run_pipeline
from biolit.fixtures import (
    fixture_lexicon,
    fixture_pairs,
    fixture_questions,
    fixture_rules,
    toy10_documents,
)
from biolit.index import build_index


@pytest.fixture(scope="session")
def lexicon():
    return fixture_lexicon()


@pytest.fixture(scope="session")
def rules():
    return fixture_rules()


@pytest.fixture(scope="session")
def toy10(lexicon, rules):
    """Annotated fixture corpus, built once per test session."""
    return run_pipeline(toy10_documents(), lexicon, rules)


@pytest.fixture(scope="session")
def snapshot(toy10, lexicon):
    return build_index(toy10, lexicon)


@pytest.fixture(scope="session")
def questions():
    return fixture_questions()


@pytest.fixture(scope="session")
def pairs():
    return fixture_pairs()
