"""Tokenizer and sentence splitter contracts."""

from biolit.text import (
    fold_term,
    fold_token,
    sentence_index,
    split_sentences,
    subtokens,
    tokenize,
)


def test_hyphen_joins_tokens():
    tokens = [t.text for t in tokenize("SARS-CoV-2 infection in MCF-7 cells")]
    assert tokens == ["SARS-CoV-2", "infection", "in", "MCF-7", "cells"]


def test_token_offsets():
    for tok in tokenize("Paraoxonase-1 (PON1) protects."):
        assert "Paraoxonase-1 (PON1) protects."[tok.start : tok.end] == tok.text


def test_subtokens_split_hyphens():
    assert subtokens("SARS-CoV-2") == ["sars", "cov", "2"]
    assert subtokens("plain") == ["plain"]


def test_fold_term_punctuation_normalizes():
    assert fold_term("SARS-CoV-2 infection") == "sars cov 2 infection"
    assert fold_term("Paraoxonase-1") == fold_term("paraoxonase 1")
    assert fold_term("Café") == "cafe"


def test_fold_token_accents():
    assert fold_token("Étude") == "etude"


def test_sentence_split_basic():
    text = "One sentence here. Another one follows! A third? Yes."
    spans = split_sentences(text)
    assert [text[s:e] for s, e in spans] == [
        "One sentence here.",
        "Another one follows!",
        "A third?",
        "Yes.",
    ]


def test_sentence_split_blocklist():
    text = "Values rose, e.g. in serum. See Fig. 2 for plots. Results differ vs. controls."
    spans = split_sentences(text)
    assert [text[s:e] for s, e in spans] == [
        "Values rose, e.g. in serum.",
        "See Fig. 2 for plots.",
        "Results differ vs. controls.",
    ]


def test_sentence_split_requires_capital_or_digit():
    text = "Levels of p. aeruginosa were high. next word lowercase stays joined."
    spans = split_sentences(text)
    assert len(spans) == 1


def test_sentence_index_gaps():
    text = "First one. Second one."
    spans = split_sentences(text)
    assert sentence_index(spans, 0) == 0
    assert sentence_index(spans, 9) == 0
    assert sentence_index(spans, 10) == 0  # gap attaches to preceding sentence
    assert sentence_index(spans, 11) == 1
    assert sentence_index(spans, len(text) + 5) == 1


def test_empty_text():
    assert split_sentences("") == []
    assert split_sentences("   ") == []
    assert tokenize("") == []
