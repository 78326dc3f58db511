"""Parenthetical abbreviation detection."""

from biolit.abbrev import detect_abbreviations
from biolit.docmodel import Document, Passage, SectionKind


def _doc(abstract: str, title: str = "A title.") -> Document:
    return Document(
        pmid=1,
        title=title,
        passages=(
            Passage(SectionKind.TITLE, title, 0),
            Passage(SectionKind.ABSTRACT, abstract, len(title) + 1),
        ),
    )


def test_simple_definition():
    pairs = detect_abbreviations(
        _doc("Paraoxonase-1 (PON1) protects against oxidative stress.")
    )
    assert [(p.short_form, p.long_form) for p in pairs] == [("PON1", "Paraoxonase-1")]
    assert 0.0 <= pairs[0].confidence <= 1.0


def test_no_parentheses():
    assert detect_abbreviations(_doc("No definitions appear in this text.")) == []


def test_nested_parenthetical_long_form():
    pairs = detect_abbreviations(
        _doc("Alterations involved the chemokine (C-C motif) ligand 2 (CCL2).")
    )
    assert [(p.short_form, p.long_form) for p in pairs] == [
        ("CCL2", "chemokine (C-C motif) ligand 2")
    ]


def test_multi_word_long_form():
    pairs = detect_abbreviations(
        _doc("Patients received prophylactic cranial irradiation (PCI) on schedule.")
    )
    assert [(p.short_form, p.long_form) for p in pairs] == [
        ("PCI", "prophylactic cranial irradiation")
    ]


def test_unalignable_short_form_skipped():
    pairs = detect_abbreviations(_doc("The cohort was recruited in 2021 (XYZQ)."))
    assert pairs == []


def test_numeric_parenthetical_skipped():
    assert detect_abbreviations(_doc("Mean value was similar (12.5).")) == []


def test_document_order_and_passage_index():
    doc = Document(
        pmid=1,
        title="Paraoxonase-1 (PON1) in disease.",
        passages=(
            Passage(SectionKind.TITLE, "Paraoxonase-1 (PON1) in disease.", 0),
            Passage(
                SectionKind.ABSTRACT,
                "We measured interleukin 17 (IL17) levels.",
                33,
            ),
        ),
    )
    pairs = detect_abbreviations(doc)
    assert [(p.short_form, p.passage_index) for p in pairs] == [("PON1", 0), ("IL17", 1)]


def test_short_form_must_be_shorter():
    pairs = detect_abbreviations(_doc("It is (ITIS) here."))
    assert all(len(p.short_form) < len(p.long_form) for p in pairs)


def test_confidence_is_word_start_fraction():
    import pytest

    (pair,) = detect_abbreviations(
        _doc("Patients received prophylactic cranial irradiation (PCI) on schedule.")
    )
    # P and C align at word starts; the final I lands word-internal
    assert pair.confidence == pytest.approx(2 / 3)
