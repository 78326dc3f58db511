"""Agent tools, orchestration loop, and citation verification."""

import pytest

from biolit.errors import BadKey, BudgetExhausted, ClaimParseError, SchemaError
from biolit.mockllm import (
    QUESTION_PLANS,
    FabricatorMock,
    GroundedMock,
    NoToolMock,
    OverBudgetMock,
    SearchOnlyMock,
    mock_for,
)
from biolit.ragent import (
    AgentAnswer,
    Claim,
    orchestrate,
    parse_claims,
    tool_export_relevant_search_results,
    tool_find_entity_id,
    tool_find_related_entities,
    verify_citations,
)

QUESTION = "What drugs can treat breast cancer?"


class TestTools:
    def test_find_entity_id(self, snapshot):
        assert tool_find_entity_id("breast cancer", snapshot)[0] == "@DISEASE_Breast_Cancer"
        assert tool_find_entity_id("PON1", snapshot)[0] == "@GENE_PON1"
        assert tool_find_entity_id("zzz", snapshot) == []
        assert tool_find_entity_id("", snapshot) == []

    def test_find_entity_id_cap(self, snapshot):
        assert len(tool_find_entity_id("c", snapshot)) <= 5

    def test_find_related_entities(self, snapshot):
        rows = tool_find_related_entities(
            "@DISEASE_Breast_Cancer", snapshot, rtype="treat", target_type="Chemical"
        )
        assert {r["entity"] for r in rows} == {"@CHEMICAL_Doxorubicin", "@CHEMICAL_Tamoxifen"}
        assert all(r["pmid_count"] >= 1 for r in rows)

    def test_find_related_unknown_key(self, snapshot):
        assert tool_find_related_entities("@GENE_NOPE99", snapshot) == []

    def test_find_related_bad_key(self, snapshot):
        with pytest.raises(BadKey):
            tool_find_related_entities("not-a-key", snapshot)

    def test_related_cap_at_five(self, lexicon, rules):
        from biolit.annotator import run_pipeline
        from biolit.docmodel import Document, Passage, SectionKind
        from biolit.index import build_index

        chems = [
            "Tamoxifen",
            "Doxorubicin",
            "Cyclophosphamide",
            "Paclitaxel",
            "Trastuzumab",
            "Finasteride",
            "Cocaine",
        ]
        docs = []
        for i, chem in enumerate(chems):
            title = f"{chem} treats breast cancer."
            docs.append(
                Document(
                    pmid=3000 + i,
                    title=title,
                    pub_year=2020,
                    passages=(Passage(SectionKind.TITLE, title, 0),),
                )
            )
        corpus = run_pipeline(docs, lexicon, rules)
        assert len({r.e1 for r in corpus.relations}) == 7
        snap = build_index(corpus, lexicon)
        rows = tool_find_related_entities(
            "@DISEASE_Breast_Cancer", snap, rtype="treat", target_type="Chemical"
        )
        assert len(rows) == 5

    def test_export(self, snapshot):
        pmids = tool_export_relevant_search_results(
            "@CHEMICAL_Tamoxifen", "treat", "@DISEASE_Breast_Cancer", snapshot
        )
        assert pmids == [1001]

    def test_export_schema_invalid(self, snapshot):
        with pytest.raises(SchemaError):
            tool_export_relevant_search_results(
                "@DISEASE_COVID_19", "treat", "@DISEASE_Breast_Cancer", snapshot
            )

    def test_export_absent_triple(self, snapshot):
        assert (
            tool_export_relevant_search_results(
                "@CHEMICAL_Scopolamine", "treat", "@DISEASE_Pain", snapshot
            )
            == []
        )

    def test_export_newest_first(self, lexicon, rules):
        from biolit.annotator import run_pipeline
        from biolit.docmodel import Document, Passage, SectionKind
        from biolit.index import build_index

        docs = []
        for pmid, year in ((4001, 2018), (4002, 2024), (4003, 2021)):
            title = "Tamoxifen treats breast cancer."
            docs.append(
                Document(
                    pmid=pmid,
                    title=title,
                    pub_year=year,
                    passages=(Passage(SectionKind.TITLE, title, 0),),
                )
            )
        corpus = run_pipeline(docs, lexicon, rules)
        snap = build_index(corpus, lexicon)
        assert tool_export_relevant_search_results(
            "@CHEMICAL_Tamoxifen", "treat", "@DISEASE_Breast_Cancer", snap
        ) == [4002, 4003, 4001]

    def test_tool_determinism(self, snapshot):
        for _ in range(3):
            assert tool_find_entity_id("breast cancer", snapshot) == tool_find_entity_id(
                "breast cancer", snapshot
            )
            assert tool_find_related_entities(
                "@DISEASE_Breast_Cancer", snapshot, rtype="treat"
            ) == tool_find_related_entities("@DISEASE_Breast_Cancer", snapshot, rtype="treat")


class TestOrchestrate:
    def test_three_step_flow(self, snapshot):
        answer = orchestrate(QUESTION, GroundedMock(QUESTION_PLANS["q6"]), snapshot)
        assert [c.name for c in answer.transcript] == [
            "find_entity_id",
            "find_related_entities",
            "export_relevant_search_results",
        ]
        assert not answer.degraded
        assert answer.summary.startswith("Summary:")
        cited = answer.cited_pmids()
        assert cited
        tool_pmids = {1005}
        assert set(cited) <= {
            p for call in answer.transcript for p in _ints(call.result)
        }

    def test_citation_closure_all_modes(self, snapshot, questions):
        for qid, text in questions:
            answer = orchestrate(text, mock_for("grounded", qid, snapshot), snapshot)
            tool_pmids = {
                p for call in answer.transcript for p in _ints(call.result)
            }
            for pmid in answer.cited_pmids():
                assert pmid in tool_pmids
            assert not answer.fabricated_pmids

    def test_fabricated_pmid_flagged(self, snapshot):
        answer = orchestrate(
            QUESTION, FabricatorMock(QUESTION_PLANS["q6"], (8888888,)), snapshot
        )
        assert answer.degraded
        assert answer.fabricated_pmids == (8888888,)

    def test_budget_exhausted(self, snapshot):
        with pytest.raises(BudgetExhausted) as err:
            orchestrate("anything", OverBudgetMock(), snapshot, budget=3)
        assert len(err.value.transcript) == 3

    def test_budget_minimum(self, snapshot):
        with pytest.raises(ValueError):
            orchestrate("q", OverBudgetMock(), snapshot, budget=2)

    def test_missing_summary_prefix_degrades(self, snapshot):
        class BareMock:
            def complete(self, messages, tools, temperature=0.0):
                return {
                    "content": 'No prefix here.\nClaims-JSON: {"claims": []}',
                    "tool_calls": [],
                }

        answer = orchestrate("q", BareMock(), snapshot)
        assert answer.degraded
        assert any("Summary" in p for p in answer.problems)


def _ints(value):
    from biolit.ragent import _pmids_in

    return _pmids_in(value)


class TestClaims:
    def test_parse_claims(self):
        text = 'Summary: x.\nClaims-JSON: {"claims": [{"subject": "@CHEMICAL_X", "type": "treat", "object": "@DISEASE_Y", "pmids": [1, 2]}]}'
        (claim,) = parse_claims(text)
        assert claim == Claim("@CHEMICAL_X", "TREAT", "@DISEASE_Y", (1, 2))

    def test_parse_claims_missing_block(self):
        with pytest.raises(ClaimParseError):
            parse_claims("Summary: no block here")

    def test_parse_claims_malformed(self):
        with pytest.raises(ClaimParseError):
            parse_claims("Summary: x.\nClaims-JSON: {nope}")


class TestVerifyCitations:
    def test_all_supported(self, snapshot):
        answer = orchestrate(QUESTION, GroundedMock(QUESTION_PLANS["q6"]), snapshot)
        report = verify_citations(answer, snapshot)
        assert report.precision == 1.0
        assert report.nonexistent == 0
        assert report.as_fraction() == "1 / 1"

    def test_fake_among_real_precision(self, snapshot):
        claims = (
            Claim(
                "@CHEMICAL_Tamoxifen",
                "TREAT",
                "@DISEASE_Breast_Cancer",
                (1001, 9999991, 1001, 1001),
            ),
        )
        # 4 citations, 1 fake: precision (4-1)/4
        answer = AgentAnswer(summary="Summary: x", claims=claims, transcript=())
        report = verify_citations(answer, snapshot)
        assert report.total == 4
        assert report.nonexistent == 1
        assert report.precision == pytest.approx(3 / 4)

    def test_real_doc_without_relation_unsupported(self, snapshot):
        claims = (
            Claim("@CHEMICAL_Tamoxifen", "TREAT", "@DISEASE_Breast_Cancer", (1003,)),
        )
        answer = AgentAnswer(summary="Summary: x", claims=claims, transcript=())
        report = verify_citations(answer, snapshot)
        assert report.unsupported == 1
        assert report.precision == 0.0

    def test_sentence_cooccurrence_fallback(self, snapshot):
        # 1002 has PON1 and COVID-19 in one sentence but no stored relation
        claims = (Claim("@GENE_PON1", "ASSOCIATE", "@DISEASE_COVID_19", (1002,)),)
        answer = AgentAnswer(summary="Summary: x", claims=claims, transcript=())
        report = verify_citations(answer, snapshot)
        assert report.supported == 1

    def test_distant_cooccurrence_not_enough(self, snapshot):
        claims = (Claim("@GENE_PON1", "ASSOCIATE", "@DISEASE_COVID_19", (1003,)),)
        answer = AgentAnswer(summary="Summary: x", claims=claims, transcript=())
        report = verify_citations(answer, snapshot)
        assert report.unsupported == 1

    def test_bad_claim_keys(self, snapshot):
        answer = AgentAnswer(
            summary="Summary: x",
            claims=(Claim("not-a-key", "TREAT", "@DISEASE_Y", (1,)),),
            transcript=(),
        )
        with pytest.raises(ClaimParseError):
            verify_citations(answer, snapshot)

    def test_counts_sum(self, snapshot, questions):
        for qid, text in questions:
            for mode in ("no-tool", "search-only", "grounded"):
                answer = orchestrate(text, mock_for(mode, qid, snapshot), snapshot)
                report = verify_citations(answer, snapshot)
                assert report.supported + report.unsupported + report.nonexistent == report.total


class TestQualitativeOrdering:
    def test_strict_ordering_across_modes(self, snapshot, questions):
        precision = {}
        for mode in ("no-tool", "search-only", "grounded"):
            supported = total = 0
            for qid, text in questions:
                answer = orchestrate(text, mock_for(mode, qid, snapshot), snapshot)
                report = verify_citations(answer, snapshot)
                supported += report.supported
                total += report.total
            assert total > 0
            precision[mode] = supported / total
        assert precision["no-tool"] < precision["search-only"] < precision["grounded"]
