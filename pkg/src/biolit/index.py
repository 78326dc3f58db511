"""Immutable searchable snapshot: postings, relation store, dictionary.

``build_index`` turns an annotated corpus into an :class:`IndexSnapshot`;
``merge`` folds a delta corpus into an existing snapshot and is exactly
equivalent to rebuilding from the union (delta documents replace base
documents with the same PMID).  Snapshots persist to a single versioned,
checksummed file and compare equal after a round trip.
"""

from __future__ import annotations

import hashlib
import json
import struct
from dataclasses import dataclass, field, fields

from .annotator import AnnotatedCorpus
from .docmodel import (
    Document,
    EntityType,
    RelationType,
    SectionKind,
    is_semantic_key,
    key_entity_type,
)
from .errors import BadKey, ChecksumMismatch, DuplicatePmid, VersionMismatch
from .lexicon import Lexicon
from .text import STOPWORDS, fold_term, sentence_index, split_sentences, tokenize

FORMAT_VERSION = 1
_MAGIC = b"BLIX"
_TOP_K = 50


@dataclass(frozen=True)
class DocMeta:
    pmid: int
    title: str
    journal: str
    pub_year: int
    pub_types: tuple[str, ...]
    pmcid: str | None
    # (section kind value, offset, length) per passage
    passages: tuple[tuple[str, int, int], ...]
    text: str

    def passage_span(self, index: int) -> tuple[int, int]:
        _, offset, length = self.passages[index]
        return offset, offset + length

    def section_of(self, index: int) -> SectionKind:
        return SectionKind(self.passages[index][0])


@dataclass(frozen=True)
class KeywordPosting:
    """Positions of one term inside one passage of one document."""

    pmid: int
    passage_index: int
    section: str
    positions: tuple[int, ...]


@dataclass(frozen=True)
class EntityPosting:
    """One entity mention occurrence."""

    pmid: int
    passage_index: int
    section: str
    sentence_id: int
    start: int
    length: int
    token_pos: int


@dataclass(frozen=True)
class DictEntry:
    """One autocomplete dictionary row (a name or synonym)."""

    synonym: str
    semantic_key: str
    etype: str
    name: str
    identifier: str
    doc_freq: int


@dataclass(frozen=True)
class IndexStats:
    documents: int = 0
    annotations: int = 0
    unique_identifiers: int = 0
    relations: int = 0
    unique_pairs: int = 0


class _TrieNode:
    __slots__ = ("children", "entries", "top")

    def __init__(self):
        self.children: dict[str, _TrieNode] = {}
        self.entries: list[DictEntry] = []
        self.top: list[DictEntry] = []


class DictionaryTrie:
    """Prefix trie over folded names/synonyms with per-node top-k caches.

    Synonym suffixes starting at word boundaries are inserted too, so
    "cancer" reaches "breast cancer".  Each node caches the best entries
    in its subtree (by document frequency, then name) which makes lookups
    independent of subtree size.
    """

    def __init__(self, entries: tuple[DictEntry, ...]):
        self.root = _TrieNode()
        self._exact: dict[str, DictEntry] = {}
        for entry in entries:
            folded = fold_term(entry.synonym)
            if not folded:
                continue
            previous = self._exact.get(folded)
            if previous is None or self._rank(entry) < self._rank(previous):
                self._exact[folded] = entry
            starts = [0] + [i + 1 for i, c in enumerate(folded) if c == " "]
            for s in starts:
                self._insert(folded[s:], entry)
        self._finalize(self.root)

    @staticmethod
    def _rank(entry: DictEntry) -> tuple:
        return (-entry.doc_freq, entry.name, entry.semantic_key, entry.synonym)

    def _insert(self, word: str, entry: DictEntry) -> None:
        node = self.root
        for ch in word:
            node = node.children.setdefault(ch, _TrieNode())
        node.entries.append(entry)

    def _finalize(self, node: _TrieNode) -> None:
        merged = list(node.entries)
        for child in node.children.values():
            self._finalize(child)
            merged.extend(child.top)
        merged.sort(key=self._rank)
        seen: set[str] = set()
        top = []
        for entry in merged:
            if entry.semantic_key in seen:
                continue
            seen.add(entry.semantic_key)
            top.append(entry)
            if len(top) >= _TOP_K:
                break
        node.top = top

    def lookup_prefix(self, prefix: str, limit: int) -> list[DictEntry]:
        node = self.root
        for ch in fold_term(prefix):
            node = node.children.get(ch)
            if node is None:
                return []
        return node.top[:limit]

    def lookup_exact(self, term: str) -> DictEntry | None:
        return self._exact.get(fold_term(term))


@dataclass(frozen=True, eq=False)
class IndexSnapshot:
    docs: dict[int, DocMeta] = field(default_factory=dict)
    keyword_postings: dict[str, tuple[KeywordPosting, ...]] = field(default_factory=dict)
    entity_postings: dict[str, tuple[EntityPosting, ...]] = field(default_factory=dict)
    # (rtype value, e1, e2) -> ((pmid, evidence passage indices), ...)
    relation_store: dict[tuple[str, str, str], tuple[tuple[int, tuple[int, ...]], ...]] = field(
        default_factory=dict
    )
    dictionary: tuple[DictEntry, ...] = ()
    entity_identifiers: dict[str, str] = field(default_factory=dict)
    year_index: dict[int, int] = field(default_factory=dict)
    doc_lengths: dict[int, int] = field(default_factory=dict)
    stats: IndexStats = field(default_factory=IndexStats)

    def __post_init__(self):
        object.__setattr__(self, "trie", DictionaryTrie(self.dictionary))

    def __eq__(self, other):
        if not isinstance(other, IndexSnapshot):
            return NotImplemented
        return all(
            getattr(self, f.name) == getattr(other, f.name) for f in fields(self)
        )

    def entity_pmids(self, key: str) -> set[int]:
        return {p.pmid for p in self.entity_postings.get(key, ())}

    def relation_pmids(self, rtype: RelationType, e1: str, e2: str) -> list[int]:
        from .docmodel import canonical_pair

        a, b = canonical_pair(e1, e2)
        occ = self.relation_store.get((rtype.value, a, b), ())
        return sorted({pmid for pmid, _ in occ})

    def has_relation_between(
        self, e1: str, e2: str, rtype: RelationType | None = None
    ) -> set[int]:
        """PMIDs holding any (or the given) relation between two keys."""
        from .docmodel import canonical_pair

        a, b = canonical_pair(e1, e2)
        out: set[int] = set()
        for (rt, x, y), occ in self.relation_store.items():
            if (x, y) != (a, b):
                continue
            if rtype is not None and rt != rtype.value:
                continue
            out.update(pmid for pmid, _ in occ)
        return out

    def average_doc_length(self) -> float:
        if not self.doc_lengths:
            return 0.0
        return sum(self.doc_lengths.values()) / len(self.doc_lengths)


class _Builder:
    def __init__(self):
        self.docs: dict[int, DocMeta] = {}
        self.keyword: dict[str, dict[tuple[int, int], list[int]]] = {}
        self.entities: dict[str, list[EntityPosting]] = {}
        self.relations: dict[tuple[str, str, str], dict[int, set[int]]] = {}
        self.identifiers: dict[str, str] = {}
        self.doc_lengths: dict[int, int] = {}

    def add_meta(
        self,
        meta: DocMeta,
        annotations: list[tuple[int, int, str, str]],
        relations: list[tuple[str, str, str, tuple[int, ...]]],
        *,
        replace: bool = False,
    ) -> None:
        if meta.pmid in self.docs and not replace:
            raise DuplicatePmid(f"pmid {meta.pmid} appears twice in the corpus")
        self.docs[meta.pmid] = meta
        length = 0
        for pidx in range(len(meta.passages)):
            p_start, p_end = meta.passage_span(pidx)
            section = meta.passages[pidx][0]
            text = meta.text[p_start:p_end]
            tokens = tokenize(text)
            length += len(tokens)
            sentences = split_sentences(text)
            for i, tok in enumerate(tokens):
                term = tok.folded
                if term in STOPWORDS:
                    continue
                self.keyword.setdefault(term, {}).setdefault(
                    (meta.pmid, pidx), []
                ).append(i)
            for start, ann_len, key, ident in annotations:
                if not (p_start <= start and start + ann_len <= p_end):
                    continue
                local = start - p_start
                token_pos = next(
                    (i for i, t in enumerate(tokens) if t.end > local), len(tokens)
                )
                self.entities.setdefault(key, []).append(
                    EntityPosting(
                        pmid=meta.pmid,
                        passage_index=pidx,
                        section=section,
                        sentence_id=sentence_index(sentences, local),
                        start=start,
                        length=ann_len,
                        token_pos=token_pos,
                    )
                )
                self.identifiers.setdefault(key, ident)
        self.doc_lengths[meta.pmid] = length
        for rtype, e1, e2, evidence in relations:
            by_pmid = self.relations.setdefault((rtype, e1, e2), {})
            by_pmid.setdefault(meta.pmid, set()).update(evidence)

    def add_document(self, doc: Document, relations, *, replace: bool = False) -> None:
        meta = DocMeta(
            pmid=doc.pmid,
            title=doc.title,
            journal=doc.journal,
            pub_year=doc.pub_year,
            pub_types=tuple(sorted(doc.pub_types)),
            pmcid=doc.pmcid,
            passages=tuple(
                (p.section_kind.value, p.offset, len(p.text)) for p in doc.passages
            ),
            text=doc.full_text(),
        )
        annotations = [
            (a.start, a.length, a.semantic_key, str(a.identifier))
            for a in doc.all_annotations()
        ]
        rels = [(r.rtype.value, r.e1, r.e2, r.evidence) for r in relations]
        self.add_meta(meta, annotations, rels, replace=replace)

    def drop(self, pmid: int) -> None:
        self.docs.pop(pmid, None)
        self.doc_lengths.pop(pmid, None)
        for term in list(self.keyword):
            table = self.keyword[term]
            for key in [k for k in table if k[0] == pmid]:
                del table[key]
            if not table:
                del self.keyword[term]
        for key in list(self.entities):
            kept = [p for p in self.entities[key] if p.pmid != pmid]
            if kept:
                self.entities[key] = kept
            else:
                del self.entities[key]
        for triple in list(self.relations):
            self.relations[triple].pop(pmid, None)
            if not self.relations[triple]:
                del self.relations[triple]

    def finalize(self, lexicon: Lexicon | None) -> IndexSnapshot:
        keyword_postings = {
            term: tuple(
                KeywordPosting(
                    pmid=pmid,
                    passage_index=pidx,
                    section=self.docs[pmid].passages[pidx][0],
                    positions=tuple(sorted(set(positions))),
                )
                for (pmid, pidx), positions in sorted(table.items())
            )
            for term, table in sorted(self.keyword.items())
        }
        entity_postings = {
            key: tuple(sorted(posts, key=lambda p: (p.pmid, p.start)))
            for key, posts in sorted(self.entities.items())
        }
        relation_store = {
            triple: tuple(
                (pmid, tuple(sorted(evidence)))
                for pmid, evidence in sorted(by_pmid.items())
            )
            for triple, by_pmid in sorted(self.relations.items())
        }
        freqs = {key: len({p.pmid for p in posts}) for key, posts in entity_postings.items()}
        dictionary = _build_dictionary(lexicon, entity_postings, self.identifiers, freqs)
        total_relations = sum(len(occ) for occ in relation_store.values())
        unique_pairs = len({(e1, e2) for (_, e1, e2) in relation_store})
        stats = IndexStats(
            documents=len(self.docs),
            annotations=sum(len(p) for p in entity_postings.values()),
            unique_identifiers=len(set(self.identifiers.values())),
            relations=total_relations,
            unique_pairs=unique_pairs,
        )
        return IndexSnapshot(
            docs=dict(sorted(self.docs.items())),
            keyword_postings=keyword_postings,
            entity_postings=entity_postings,
            relation_store=relation_store,
            dictionary=dictionary,
            entity_identifiers=dict(sorted(self.identifiers.items())),
            year_index={pmid: m.pub_year for pmid, m in sorted(self.docs.items())},
            doc_lengths=dict(sorted(self.doc_lengths.items())),
            stats=stats,
        )


def _display_name_from_key(key: str) -> str:
    return key.split("_", 1)[1].replace("_", " ")


def _build_dictionary(
    lexicon: Lexicon | None,
    entity_postings,
    identifiers: dict[str, str],
    freqs: dict[str, int],
) -> tuple[DictEntry, ...]:
    entries: list[DictEntry] = []
    covered: set[str] = set()
    if lexicon is not None:
        for lex_entry in lexicon.entries:
            key = lex_entry.semantic_key
            covered.add(key)
            entries.append(
                DictEntry(
                    synonym=lex_entry.surface,
                    semantic_key=key,
                    etype=lex_entry.etype.value,
                    name=lex_entry.preferred_name,
                    identifier=str(lex_entry.identifier),
                    doc_freq=freqs.get(key, 0),
                )
            )
    for key in entity_postings:
        if key in covered:
            continue
        name = _display_name_from_key(key)
        entries.append(
            DictEntry(
                synonym=name,
                semantic_key=key,
                etype=key_entity_type(key).value,
                name=name,
                identifier=identifiers.get(key, ""),
                doc_freq=freqs.get(key, 0),
            )
        )
    entries.sort(key=lambda e: (e.semantic_key, e.synonym))
    return tuple(entries)


def build_index(corpus: AnnotatedCorpus, lexicon: Lexicon | None = None) -> IndexSnapshot:
    """Index an annotated corpus.  Raises DuplicatePmid on PMID collisions."""
    builder = _Builder()
    for doc in corpus.documents:
        doc.validate()
        builder.add_document(doc, corpus.relations_for(doc.pmid))
    return builder.finalize(lexicon)


def merge(
    base: IndexSnapshot, delta: AnnotatedCorpus, lexicon: Lexicon | None = None
) -> IndexSnapshot:
    """New snapshot equal to rebuilding over base ∪ delta; base unchanged."""
    builder = _Builder()
    for pmid, meta in base.docs.items():
        annotations = [
            (p.start, p.length, key, base.entity_identifiers.get(key, ""))
            for key, posts in base.entity_postings.items()
            for p in posts
            if p.pmid == pmid
        ]
        annotations.sort()
        relations = [
            (rtype, e1, e2, evidence)
            for (rtype, e1, e2), occ in base.relation_store.items()
            for occ_pmid, evidence in occ
            if occ_pmid == pmid
        ]
        builder.add_meta(meta, annotations, relations)
    for doc in delta.documents:
        doc.validate()
        builder.drop(doc.pmid)
        builder.add_document(doc, delta.relations_for(doc.pmid), replace=True)
    return builder.finalize(lexicon)


def _parse_endpoint(value: str | None):
    """A relation query endpoint: concrete key, type wildcard, or absent."""
    if value is None or value == "":
        return ("any", None)
    if value.startswith("@"):
        if not is_semantic_key(value):
            raise BadKey(f"malformed semantic key: {value!r}")
        return ("key", value)
    try:
        return ("type", EntityType(value))
    except ValueError:
        raise BadKey(f"expected a semantic key or entity type, got {value!r}") from None


def _endpoint_matches(spec, key: str) -> bool:
    kind, value = spec
    if kind == "any":
        return True
    if kind == "key":
        return key == value
    return key_entity_type(key) is value


@dataclass(frozen=True)
class RelationHit:
    rtype: RelationType
    e1: str
    e2: str
    pmids: tuple[int, ...]


def lookup_relations(
    snapshot: IndexSnapshot,
    e1: str | None,
    rtype: RelationType | None = None,
    e2: str | None = None,
) -> list[RelationHit]:
    """Relation-store query with at most one wildcard side concrete-free.

    Results are oriented to echo the query (the endpoint matched by ``e1``
    comes first) and sorted by descending PMID count, then key.
    """
    spec1 = _parse_endpoint(e1)
    spec2 = _parse_endpoint(e2)
    if spec1[0] != "key" and spec2[0] != "key":
        raise BadKey("at least one endpoint must be a concrete semantic key")
    hits = []
    for (rt, a, b), occ in snapshot.relation_store.items():
        if rtype is not None and rt != rtype.value:
            continue
        pmids = tuple(sorted({pmid for pmid, _ in occ}))
        if _endpoint_matches(spec1, a) and _endpoint_matches(spec2, b):
            hits.append(RelationHit(RelationType(rt), a, b, pmids))
        elif _endpoint_matches(spec1, b) and _endpoint_matches(spec2, a):
            hits.append(RelationHit(RelationType(rt), b, a, pmids))
    hits.sort(key=lambda h: (-len(h.pmids), h.rtype.value, h.e1, h.e2))
    return hits


# --- persistence -----------------------------------------------------------


def _snapshot_to_sections(snapshot: IndexSnapshot) -> list[bytes]:
    def dump(obj) -> bytes:
        return json.dumps(obj, sort_keys=True, ensure_ascii=False).encode("utf-8")

    docs = {
        str(pmid): {
            "pmid": m.pmid,
            "title": m.title,
            "journal": m.journal,
            "pub_year": m.pub_year,
            "pub_types": list(m.pub_types),
            "pmcid": m.pmcid,
            "passages": [list(p) for p in m.passages],
            "text": m.text,
        }
        for pmid, m in snapshot.docs.items()
    }
    keyword = {
        term: [[p.pmid, p.passage_index, p.section, list(p.positions)] for p in posts]
        for term, posts in snapshot.keyword_postings.items()
    }
    entities = {
        key: [
            [p.pmid, p.passage_index, p.section, p.sentence_id, p.start, p.length, p.token_pos]
            for p in posts
        ]
        for key, posts in snapshot.entity_postings.items()
    }
    relations = [
        [rt, e1, e2, [[pmid, list(ev)] for pmid, ev in occ]]
        for (rt, e1, e2), occ in sorted(snapshot.relation_store.items())
    ]
    dictionary = [
        [d.synonym, d.semantic_key, d.etype, d.name, d.identifier, d.doc_freq]
        for d in snapshot.dictionary
    ]
    meta = {
        "stats": {
            "documents": snapshot.stats.documents,
            "annotations": snapshot.stats.annotations,
            "unique_identifiers": snapshot.stats.unique_identifiers,
            "relations": snapshot.stats.relations,
            "unique_pairs": snapshot.stats.unique_pairs,
        },
        "year_index": {str(k): v for k, v in snapshot.year_index.items()},
        "doc_lengths": {str(k): v for k, v in snapshot.doc_lengths.items()},
        "entity_identifiers": snapshot.entity_identifiers,
    }
    return [dump(meta), dump(docs), dump(keyword), dump(entities), dump(relations), dump(dictionary)]


def persist(snapshot: IndexSnapshot, path: str) -> None:
    """Write the snapshot: magic, version, length-prefixed sections, digest."""
    sections = _snapshot_to_sections(snapshot)
    payload = bytearray()
    payload += _MAGIC
    payload += struct.pack("<I", FORMAT_VERSION)
    payload += struct.pack("<I", len(sections))
    for section in sections:
        payload += struct.pack("<Q", len(section))
        payload += section
    digest = hashlib.sha256(bytes(payload)).digest()
    with open(path, "wb") as fh:
        fh.write(bytes(payload))
        fh.write(digest)


def load(path: str) -> IndexSnapshot:
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < len(_MAGIC) + 8 + 32 or blob[: len(_MAGIC)] != _MAGIC:
        raise ChecksumMismatch(f"{path}: not a snapshot file or truncated")
    payload, digest = blob[:-32], blob[-32:]
    version = struct.unpack_from("<I", payload, len(_MAGIC))[0]
    if version > FORMAT_VERSION:
        raise VersionMismatch(
            f"{path}: written by format version {version}, this build reads ≤ {FORMAT_VERSION}"
        )
    if hashlib.sha256(payload).digest() != digest:
        raise ChecksumMismatch(f"{path}: checksum does not match")
    n_sections = struct.unpack_from("<I", payload, len(_MAGIC) + 4)[0]
    pos = len(_MAGIC) + 8
    sections = []
    for _ in range(n_sections):
        if pos + 8 > len(payload):
            raise ChecksumMismatch(f"{path}: section table truncated")
        (length,) = struct.unpack_from("<Q", payload, pos)
        pos += 8
        if pos + length > len(payload):
            raise ChecksumMismatch(f"{path}: section overruns file")
        sections.append(payload[pos : pos + length])
        pos += length
    if len(sections) != 6:
        raise ChecksumMismatch(f"{path}: expected 6 sections, found {len(sections)}")
    meta, docs_raw, keyword_raw, entities_raw, relations_raw, dict_raw = [
        json.loads(s.decode("utf-8")) for s in sections
    ]
    docs = {
        int(pmid): DocMeta(
            pmid=d["pmid"],
            title=d["title"],
            journal=d["journal"],
            pub_year=d["pub_year"],
            pub_types=tuple(d["pub_types"]),
            pmcid=d["pmcid"],
            passages=tuple(tuple(p) for p in d["passages"]),
            text=d["text"],
        )
        for pmid, d in docs_raw.items()
    }
    keyword_postings = {
        term: tuple(
            KeywordPosting(pmid, pidx, section, tuple(positions))
            for pmid, pidx, section, positions in posts
        )
        for term, posts in keyword_raw.items()
    }
    entity_postings = {
        key: tuple(EntityPosting(*p) for p in posts) for key, posts in entities_raw.items()
    }
    relation_store = {
        (rt, e1, e2): tuple((pmid, tuple(ev)) for pmid, ev in occ)
        for rt, e1, e2, occ in relations_raw
    }
    dictionary = tuple(DictEntry(*row) for row in dict_raw)
    stats = IndexStats(**meta["stats"])
    return IndexSnapshot(
        docs=docs,
        keyword_postings=keyword_postings,
        entity_postings=entity_postings,
        relation_store=relation_store,
        dictionary=dictionary,
        entity_identifiers=meta["entity_identifiers"],
        year_index={int(k): v for k, v in meta["year_index"].items()},
        doc_lengths={int(k): v for k, v in meta["doc_lengths"].items()},
        stats=stats,
    )


# --- document reconstruction -------------------------------------------------


def reconstruct_document(snapshot: IndexSnapshot, pmid: int) -> Document:
    """Rebuild a full annotated document from snapshot structures."""
    from .docmodel import EntityAnnotation, Identifier, Passage

    meta = snapshot.docs[pmid]
    annotations: list[EntityAnnotation] = []
    for key, posts in snapshot.entity_postings.items():
        ident = Identifier.parse(snapshot.entity_identifiers[key])
        for p in posts:
            if p.pmid != pmid:
                continue
            annotations.append(
                EntityAnnotation(
                    start=p.start,
                    length=p.length,
                    text=meta.text[p.start : p.start + p.length],
                    etype=key_entity_type(key),
                    identifier=ident,
                    semantic_key=key,
                )
            )
    passages = []
    for i, (kind, offset, length) in enumerate(meta.passages):
        span_anns = tuple(
            sorted(
                (a for a in annotations if offset <= a.start and a.end <= offset + length),
                key=lambda a: (a.start, a.end),
            )
        )
        passages.append(
            Passage(SectionKind(kind), meta.text[offset : offset + length], offset, span_anns)
        )
    doc = Document(
        pmid=meta.pmid,
        title=meta.title,
        journal=meta.journal,
        pub_year=meta.pub_year,
        pub_types=frozenset(meta.pub_types),
        pmcid=meta.pmcid,
        passages=tuple(passages),
    )
    doc.validate()
    return doc


def reconstruct_relations(snapshot: IndexSnapshot, pmid: int):
    """Relations recorded for one document, in canonical order."""
    from .docmodel import Relation

    out = []
    for (rt, e1, e2), occ in sorted(snapshot.relation_store.items()):
        for occ_pmid, evidence in occ:
            if occ_pmid == pmid:
                out.append(Relation(pmid, RelationType(rt), e1, e2, evidence))
    return out


# --- bulk export ------------------------------------------------------------


def entities_tsv(snapshot: IndexSnapshot) -> str:
    """Per-entity extraction summary (one row per indexed semantic key)."""
    lines = ["semantic_key\tetype\tidentifier\tname\tdoc_freq"]
    names = {d.semantic_key: d.name for d in snapshot.dictionary}
    for key in sorted(snapshot.entity_postings):
        freq = len(snapshot.entity_pmids(key))
        lines.append(
            f"{key}\t{key_entity_type(key).value}\t{snapshot.entity_identifiers.get(key, '')}"
            f"\t{names.get(key, _display_name_from_key(key))}\t{freq}"
        )
    return "\n".join(lines) + "\n"


def relations_tsv(snapshot: IndexSnapshot) -> str:
    """Per-relation extraction summary with supporting PMIDs."""
    lines = ["rtype\te1\te2\tpmid_count\tpmids"]
    for (rt, e1, e2), occ in sorted(snapshot.relation_store.items()):
        pmids = sorted({pmid for pmid, _ in occ})
        lines.append(f"{rt}\t{e1}\t{e2}\t{len(pmids)}\t{','.join(map(str, pmids))}")
    return "\n".join(lines) + "\n"
