"""Query parsing, canonical printing, and autocomplete."""

import random
import string

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from biolit.docmodel import RelationType
from biolit.errors import EmptyQuery, QueryParseError
from biolit.querylang import (
    And,
    Entity,
    Keyword,
    Not,
    Or,
    Phrase,
    RelationTerm,
    canonicalize,
    parse_query,
    print_query,
    resolve_free_term,
    suggest,
)


class TestParsing:
    def test_entity_conjunction(self):
        ast = parse_query("@DISEASE_COVID_19 AND @GENE_PON1")
        assert ast == And((Entity("@DISEASE_COVID_19"), Entity("@GENE_PON1")))

    def test_relation_term(self):
        ast = parse_query("relations:treat|@CHEMICAL_Doxorubicin|Disease")
        assert ast == RelationTerm(RelationType.TREAT, "@CHEMICAL_Doxorubicin", "Disease")

    def test_relation_any(self):
        ast = parse_query("relations:ANY|@GENE_JAK1|Chemical")
        assert ast == RelationTerm(None, "@GENE_JAK1", "Chemical")

    def test_unbalanced_paren_position(self):
        with pytest.raises(QueryParseError) as err:
            parse_query("a AND (b OR")
        assert err.value.position == 11

    def test_pure_negation_rejected(self):
        for q in ("NOT x", "NOT x OR NOT y", "NOT (a AND b)"):
            with pytest.raises(QueryParseError):
                parse_query(q)

    def test_negation_with_positive_allowed(self):
        ast = parse_query("a AND NOT b")
        assert ast == And((Keyword("a"), Not(Keyword("b"))))

    def test_empty_query(self):
        for q in ("", "   ", "\t"):
            with pytest.raises(EmptyQuery):
                parse_query(q)

    def test_operators_case_insensitive(self):
        assert parse_query("a and b") == parse_query("a AND b")
        assert parse_query("a oR b") == parse_query("a OR b")

    def test_implicit_and(self):
        assert parse_query("a b c") == And((Keyword("a"), Keyword("b"), Keyword("c")))

    def test_phrase(self):
        assert parse_query('"breast cancer"') == Phrase(("breast", "cancer"))

    def test_precedence_oracle(self):
        a, b, c, d = Keyword("a"), Keyword("b"), Keyword("c"), Keyword("d")
        cases = [
            ("a OR b AND c", Or((a, And((b, c))))),
            ("a AND b OR c", Or((And((a, b)), c))),
            ("a OR b OR c", Or((a, b, c))),
            ("a AND b AND c", And((a, b, c))),
            ("(a OR b) AND c", And((Or((a, b)), c))),
            ("a AND (b OR c)", And((a, Or((b, c))))),
            ("NOT a AND b", And((Not(a), b))),
            ("a AND NOT b", And((a, Not(b)))),
            ("a OR NOT b AND c", Or((a, And((Not(b), c))))),
            ("a b OR c", Or((And((a, b)), c))),
            ("a OR b c", Or((a, And((b, c))))),
            ("NOT (a OR b) AND c", And((Not(Or((a, b))), c))),
            ("a AND b OR c AND d", Or((And((a, b)), And((c, d))))),
            ("a OR b AND c OR d", Or((a, And((b, c)), d))),
            ("(a) AND (b)", And((a, b))),
            ("((a OR b))", Or((a, b))),
            ("a NOT b", And((a, Not(b)))),
            ("NOT NOT a AND b", And((Not(Not(a)), b))),
            ('"x y" AND a', And((Phrase(("x", "y")), a))),
            ("a AND (b OR c) d", And((a, Or((b, c)), d))),
        ]
        for text, expected in cases:
            assert parse_query(text) == expected, text


class TestPrinting:
    def test_children_sorted(self):
        ast = And((Entity("@GENE_PON1"), Entity("@DISEASE_COVID_19")))
        assert print_query(ast) == "@DISEASE_COVID_19 AND @GENE_PON1"

    def test_nested_or_parenthesized(self):
        ast = And((Keyword("a"), Or((Keyword("b"), Keyword("c")))))
        assert print_query(ast) == "a AND (b OR c)"

    def test_round_trip_structural(self):
        for text in (
            "@DISEASE_COVID_19 AND @GENE_PON1",
            "(a OR b) AND NOT c",
            'x "b c" OR relations:any|@GENE_JAK1|Chemical',
        ):
            ast = parse_query(text)
            assert parse_query(print_query(ast)) == canonicalize(ast)

    def test_print_idempotent(self):
        text = 'a OR (b AND "c d") OR NOT e AND f'
        once = print_query(parse_query(text))
        assert print_query(parse_query(once)) == once


def _ast_strategy():
    keywords = st.text(alphabet=string.ascii_lowercase, min_size=1, max_size=6).filter(
        lambda w: w.upper() not in ("AND", "OR", "NOT")
    )
    leaves = st.one_of(
        keywords.map(Keyword),
        st.lists(keywords, min_size=1, max_size=3).map(lambda ws: Phrase(tuple(ws))),
        st.sampled_from(
            ["@GENE_PON1", "@DISEASE_COVID_19", "@CHEMICAL_Tamoxifen"]
        ).map(Entity),
        st.sampled_from(
            [
                RelationTerm(RelationType.TREAT, "@CHEMICAL_Tamoxifen", "Disease"),
                RelationTerm(None, "@GENE_JAK1", "Chemical"),
            ]
        ),
    )

    def extend(children):
        return st.one_of(
            st.lists(children, min_size=2, max_size=3).map(lambda cs: And(tuple(cs))),
            st.lists(children, min_size=2, max_size=3).map(lambda cs: Or(tuple(cs))),
            st.tuples(children, children).map(lambda pair: And((pair[0], Not(pair[1])))),
        )

    return st.recursive(leaves, extend, max_leaves=8)


class TestRoundTripProperty:
    @settings(max_examples=300, deadline=None)
    @given(_ast_strategy())
    def test_parse_print_round_trip(self, ast):
        printed = print_query(ast)
        reparsed = parse_query(printed)
        assert reparsed == canonicalize(ast)
        assert print_query(reparsed) == printed


class TestFuzz:
    def test_parser_totality_small(self):
        rng = random.Random(7)
        alphabet = list(string.printable)
        for _ in range(5000):
            s = "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 30)))
            try:
                parse_query(s)
            except QueryParseError as exc:
                assert 0 <= exc.position <= len(s)


class TestSuggest:
    def test_covid_first(self, snapshot):
        got = suggest("covid", snapshot, 10)
        assert got[0].semantic_key == "@DISEASE_COVID_19"
        assert got[0].doc_freq == 3

    def test_synonym_match(self, snapshot):
        got = suggest("sars-cov-2 inf", snapshot, 10)
        assert got[0].semantic_key == "@DISEASE_COVID_19"
        assert got[0].matched_synonym == "SARS-CoV-2 infection"

    def test_word_boundary_match(self, snapshot):
        got = suggest("breast ca", snapshot, 10)
        assert any(s.semantic_key == "@DISEASE_Breast_Cancer" for s in got)
        got = suggest("cancer", snapshot, 10)
        assert any(s.semantic_key == "@DISEASE_Breast_Cancer" for s in got)

    def test_no_match(self, snapshot):
        assert suggest("qqq", snapshot, 10) == []

    def test_limit(self, snapshot):
        assert len(suggest("c", snapshot, 2)) <= 2

    def test_ranked_by_frequency(self, snapshot):
        got = suggest("c", snapshot, 25)
        freqs = [s.doc_freq for s in got]
        assert freqs == sorted(freqs, reverse=True)

    def test_monotone_under_prefix_extension(self, snapshot):
        long_suggestions = {s.semantic_key for s in suggest("covid", snapshot, 50)}
        short_suggestions = {s.semantic_key for s in suggest("cov", snapshot, 50)}
        assert long_suggestions <= short_suggestions


class TestResolveFreeTerm:
    def test_exact_names(self, snapshot):
        assert resolve_free_term("COVID-19", snapshot) == "@DISEASE_COVID_19"
        assert resolve_free_term("SARS-CoV-2 infection", snapshot) == "@DISEASE_COVID_19"

    def test_prefix_not_enough(self, snapshot):
        assert resolve_free_term("covid", snapshot) is None

    def test_synonym_pair_equality(self, snapshot):
        assert resolve_free_term("PON1", snapshot) == resolve_free_term(
            "paraoxonase 1", snapshot
        )
