"""Snapshot build, merge/rebuild equivalence, lookup, persistence."""

import random

import pytest

from biolit.annotator import AnnotatedCorpus, run_pipeline
from biolit.docmodel import RelationType
from biolit.errors import BadKey, ChecksumMismatch, DuplicatePmid, VersionMismatch
from biolit.fixtures import fixture_lexicon, fixture_rules
from biolit.index import (
    build_index,
    entities_tsv,
    load,
    lookup_relations,
    merge,
    persist,
    reconstruct_document,
    reconstruct_relations,
    relations_tsv,
)

from genutil import random_corpus


class TestBuild:
    def test_toy10_stats(self, toy10, snapshot):
        assert snapshot.stats.documents == 10
        assert snapshot.stats.annotations == sum(
            len(d.all_annotations()) for d in toy10.documents
        )
        assert snapshot.stats.relations == len(toy10.relations)
        assert snapshot.stats.unique_pairs == len(
            {(r.e1, r.e2) for r in toy10.relations}
        )

    def test_empty_corpus(self, lexicon):
        snap = build_index(AnnotatedCorpus(), lexicon)
        assert snap.stats.documents == 0
        assert snap.stats.relations == 0
        assert snap.docs == {}

    def test_duplicate_pmid(self, toy10, lexicon):
        doubled = AnnotatedCorpus(
            documents=toy10.documents + toy10.documents[:1],
            relations=toy10.relations,
        )
        with pytest.raises(DuplicatePmid):
            build_index(doubled, lexicon)

    def test_entity_postings_complete(self, toy10, snapshot):
        posted = sorted(
            (p.pmid, p.start, p.length, key)
            for key, posts in snapshot.entity_postings.items()
            for p in posts
        )
        annotated = sorted(
            (d.pmid, a.start, a.length, a.semantic_key)
            for d in toy10.documents
            for a in d.all_annotations()
        )
        assert posted == annotated

    def test_postings_sorted_no_duplicates(self, snapshot):
        for posts in snapshot.entity_postings.values():
            keys = [(p.pmid, p.start) for p in posts]
            assert keys == sorted(keys)
            assert len(set(keys)) == len(keys)
        for posts in snapshot.keyword_postings.values():
            keys = [(p.pmid, p.passage_index) for p in posts]
            assert keys == sorted(keys)
            assert len(set(keys)) == len(keys)

    def test_relation_keys_have_postings(self, snapshot):
        for (_rt, e1, e2) in snapshot.relation_store:
            assert e1 in snapshot.entity_postings
            assert e2 in snapshot.entity_postings

    def test_stats_total_relations(self, snapshot):
        assert snapshot.stats.relations == sum(
            len(occ) for occ in snapshot.relation_store.values()
        )


class TestMerge:
    def test_identity_on_empty_base(self, toy10, lexicon):
        base = build_index(AnnotatedCorpus(), lexicon)
        assert merge(base, toy10, lexicon) == build_index(toy10, lexicon)

    def test_identity_on_empty_delta(self, snapshot, lexicon):
        assert merge(snapshot, AnnotatedCorpus(), lexicon) == snapshot

    def test_base_unchanged(self, toy10, lexicon):
        base = build_index(
            AnnotatedCorpus(documents=toy10.documents[:5], relations=toy10.relations),
            lexicon,
        )
        before = base.stats
        merge(base, AnnotatedCorpus(documents=toy10.documents[5:]), lexicon)
        assert base.stats == before

    def test_reannotation_replaces(self, toy10, lexicon, rules):
        from biolit.fixtures import toy10_documents

        base = build_index(toy10, lexicon)
        # re-annotate d01 against a grown lexicon: one extra annotation
        import biolit.lexicon as lexmod

        extra = lexmod.parse_lexicon(
            "endocrine\tChemical\tMeSH:D999000\tendocrine\n"
        )
        for entry in lexicon.entries:
            extra.add(entry)
        extra.finalize()
        d01 = [d for d in toy10_documents() if d.pmid == 1001]
        delta = run_pipeline(d01, extra, rules)
        merged = merge(base, delta, extra)
        rebuilt_corpus = AnnotatedCorpus(
            documents=delta.documents + toy10.documents[1:],
            relations=delta.relations + tuple(r for r in toy10.relations if r.pmid != 1001),
        )
        assert merged == build_index(rebuilt_corpus, extra)
        assert len(merged.entity_postings["@CHEMICAL_endocrine"]) == 1

    def test_random_splits_equivalent(self, lexicon, rules):
        rng = random.Random(99)
        for _ in range(15):
            docs = random_corpus(rng, rng.randint(2, 25), lexicon)
            corpus = run_pipeline(docs, lexicon, rules)
            cut = rng.randint(0, len(corpus.documents))
            base_docs = corpus.documents[:cut]
            delta_docs = corpus.documents[cut:]
            base = AnnotatedCorpus(
                documents=base_docs,
                relations=tuple(r for r in corpus.relations if r.pmid in {d.pmid for d in base_docs}),
            )
            delta = AnnotatedCorpus(
                documents=delta_docs,
                relations=tuple(r for r in corpus.relations if r.pmid in {d.pmid for d in delta_docs}),
            )
            assert merge(build_index(base, lexicon), delta, lexicon) == build_index(
                corpus, lexicon
            )


class TestLookupRelations:
    def test_concrete_pair(self, snapshot):
        hits = lookup_relations(
            snapshot, "@DISEASE_Breast_Cancer", RelationType.TREAT, "Chemical"
        )
        found = {h.e2 for h in hits}
        assert "@CHEMICAL_Tamoxifen" in found
        assert "@CHEMICAL_Doxorubicin" in found

    def test_paper_url_shape(self, snapshot):
        hits = lookup_relations(
            snapshot, "@GENE_JAK1", RelationType.NEGATIVE_CORRELATE, "Chemical"
        )
        assert [(h.e1, h.e2, h.pmids) for h in hits] == [
            ("@GENE_JAK1", "@CHEMICAL_Filgotinib", (1006,))
        ]

    def test_symmetry(self, snapshot):
        a = lookup_relations(snapshot, "@DISEASE_COVID_19", None, "@GENE_PON1")
        b = lookup_relations(snapshot, "@GENE_PON1", None, "@DISEASE_COVID_19")
        assert {frozenset((h.e1, h.e2)) for h in a} == {frozenset((h.e1, h.e2)) for h in b}
        assert [h.pmids for h in a] == [h.pmids for h in b]

    def test_wildcards_need_anchor(self, snapshot):
        with pytest.raises(BadKey):
            lookup_relations(snapshot, "Chemical", RelationType.TREAT, "Disease")

    def test_malformed_key(self, snapshot):
        with pytest.raises(BadKey):
            lookup_relations(snapshot, "@nope", None, "Chemical")
        with pytest.raises(BadKey):
            lookup_relations(snapshot, "@GENE_JAK1", None, "Protein")

    def test_sorted_by_count_then_key(self, snapshot):
        hits = lookup_relations(snapshot, "@CHEMICAL_Doxorubicin", None, "Disease")
        counts = [len(h.pmids) for h in hits]
        assert counts == sorted(counts, reverse=True)


class TestPersistence:
    def test_round_trip(self, snapshot, tmp_path):
        path = tmp_path / "snap.idx"
        persist(snapshot, str(path))
        assert load(str(path)) == snapshot

    def test_empty_round_trip(self, lexicon, tmp_path):
        snap = build_index(AnnotatedCorpus(), lexicon)
        path = tmp_path / "empty.idx"
        persist(snap, str(path))
        assert load(str(path)) == snap

    def test_truncated_file(self, snapshot, tmp_path):
        path = tmp_path / "snap.idx"
        persist(snapshot, str(path))
        blob = path.read_bytes()
        path.write_bytes(blob[: len(blob) // 2])
        with pytest.raises(ChecksumMismatch):
            load(str(path))

    def test_corrupted_byte(self, snapshot, tmp_path):
        path = tmp_path / "snap.idx"
        persist(snapshot, str(path))
        blob = bytearray(path.read_bytes())
        blob[len(blob) // 2] ^= 0xFF
        path.write_bytes(bytes(blob))
        with pytest.raises(ChecksumMismatch):
            load(str(path))

    def test_future_version(self, snapshot, tmp_path):
        import hashlib
        import struct

        path = tmp_path / "snap.idx"
        persist(snapshot, str(path))
        blob = bytearray(path.read_bytes())[:-32]
        struct.pack_into("<I", blob, 4, 99)
        digest = hashlib.sha256(bytes(blob)).digest()
        path.write_bytes(bytes(blob) + digest)
        with pytest.raises(VersionMismatch):
            load(str(path))

    def test_not_a_snapshot(self, tmp_path):
        path = tmp_path / "junk.idx"
        path.write_bytes(b"hello world, definitely not an index")
        with pytest.raises(ChecksumMismatch):
            load(str(path))


class TestReconstruction:
    def test_document_round_trip(self, toy10, snapshot):
        for doc in toy10.documents:
            assert reconstruct_document(snapshot, doc.pmid) == doc

    def test_relations_round_trip(self, toy10, snapshot):
        for doc in toy10.documents:
            got = {r.triple() for r in reconstruct_relations(snapshot, doc.pmid)}
            want = {r.triple() for r in toy10.relations_for(doc.pmid)}
            assert got == want


class TestBulkExport:
    def test_entities_tsv(self, snapshot):
        text = entities_tsv(snapshot)
        lines = text.splitlines()
        assert lines[0] == "semantic_key\tetype\tidentifier\tname\tdoc_freq"
        assert any(l.startswith("@DISEASE_COVID_19\tDisease\tMeSH:D000086382") for l in lines)

    def test_relations_tsv(self, snapshot):
        text = relations_tsv(snapshot)
        assert "TREAT\t@CHEMICAL_Tamoxifen\t@DISEASE_Breast_Cancer\t1\t1001" in text
