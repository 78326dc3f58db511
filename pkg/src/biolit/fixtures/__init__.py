"""Packaged fixture data: the ten-document corpus, lexicon, and rule set.

These files double as shared deterministic ground truth for the test
suite and as a ready-made demo corpus for the CLI.
"""

from __future__ import annotations

from importlib import resources

from ..annotator import TriggerRule, parse_rules
from ..bioc import BiocFormat, parse_bioc
from ..docmodel import Document
from ..lexicon import Lexicon, parse_lexicon


def _read(name: str) -> str:
    return resources.files(__package__).joinpath(name).read_text(encoding="utf-8")


def fixture_lexicon() -> Lexicon:
    return parse_lexicon(_read("lexicon.tsv"))


def fixture_rules() -> list[TriggerRule]:
    return parse_rules(_read("rules.tsv"))


def fixture_questions() -> list[tuple[str, str]]:
    out = []
    for line in _read("questions.tsv").splitlines():
        if line.strip():
            qid, question = line.split("\t", 1)
            out.append((qid, question))
    return out


def fixture_pairs() -> list[tuple[str, str]]:
    out = []
    for line in _read("pairs.tsv").splitlines():
        if line.strip():
            e1, e2 = line.split("\t")
            out.append((e1, e2))
    return out


def toy10_documents() -> list[Document]:
    docs = []
    root = resources.files(__package__).joinpath("toy10")
    for entry in sorted(root.iterdir(), key=lambda e: e.name):
        if entry.name.endswith(".biocjson"):
            docs.extend(parse_bioc(entry.read_text(encoding="utf-8"), BiocFormat.JSON))
    return docs


def toy10_path(name: str) -> str:
    return str(resources.files(__package__).joinpath("toy10").joinpath(name))
