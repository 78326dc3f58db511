"""Lexicon loading, synonym groups, and mention normalization."""

import pytest

from biolit.docmodel import EntityType, Identifier, Namespace
from biolit.errors import LexiconError
from biolit.lexicon import normalize_mention, parse_lexicon


def test_fixture_lexicon_loads(lexicon):
    assert lexicon.lookup("Tamoxifen", EntityType.CHEMICAL) is not None
    assert lexicon.lookup("covid-19", EntityType.DISEASE) is not None


def test_normalize_known_synonym(lexicon):
    result = normalize_mention("SARS-CoV-2 infection", EntityType.DISEASE, lexicon)
    assert result is not None
    identifier, key = result
    assert identifier == Identifier(Namespace.MESH, "D000086382")
    assert key == "@DISEASE_COVID_19"


def test_normalize_case_and_punctuation(lexicon):
    a = normalize_mention("paraoxonase 1", EntityType.GENE, lexicon)
    b = normalize_mention("PON1", EntityType.GENE, lexicon)
    c = normalize_mention("Paraoxonase-1", EntityType.GENE, lexicon)
    assert a == b == c
    assert a is not None


def test_normalize_unknown(lexicon):
    assert normalize_mention("zzz-unknown", EntityType.CHEMICAL, lexicon) is None


def test_type_scoped_lookup(lexicon):
    assert normalize_mention("PON1", EntityType.CHEMICAL, lexicon) is None


def test_ambiguity_within_type_rejected():
    text = (
        "aspirin\tChemical\tMeSH:D001241\tAspirin\n"
        "aspirin\tChemical\tMeSH:D999999\tOther Aspirin\n"
    )
    with pytest.raises(LexiconError):
        parse_lexicon(text)


def test_duplicate_consistent_surface_tolerated():
    text = (
        "aspirin\tChemical\tMeSH:D001241\tAspirin\n"
        "Aspirin\tChemical\tMeSH:D001241\tAspirin\n"
    )
    lex = parse_lexicon(text)
    assert len(lex.entries) == 1


def test_cross_type_ambiguity_resolved_by_priority():
    text = (
        "abc\tChemical\tMeSH:D000001\tabc\n"
        "abc\tGene\tNCBIGene:1\tabc\n"
    )
    lex = parse_lexicon(text)
    entry = lex.lookup("abc")
    assert entry.etype is EntityType.GENE  # Gene outranks Chemical


def test_preferred_name_must_be_own_surface():
    with pytest.raises(LexiconError):
        parse_lexicon("synonym only\tChemical\tMeSH:D1\tNever Listed\n")


def test_namespace_type_consistency_enforced():
    with pytest.raises(Exception):
        parse_lexicon("thing\tGene\tMeSH:D1\tthing\n")


def test_bad_line_shape():
    with pytest.raises(LexiconError):
        parse_lexicon("one\ttwo\n")


def test_synonym_groups(lexicon):
    entry = lexicon.lookup("adriamycin", EntityType.CHEMICAL)
    group = lexicon.synonyms(entry.identifier)
    assert "Doxorubicin" in group
    assert "adriamycin" in group
