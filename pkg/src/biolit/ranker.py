"""Query execution over a snapshot: tiered ranking, snippets, facets.

Ranking tiers, best first:

* 3 — the snapshot holds a relation between two of the query's entities
  (any type, unless the query names one via a relation term);
* 2 — two distinct query entities share a sentence;
* 1 — a document-level semantic match (two entities in one document, or a
  single entity term present);
* 0 — keyword-only match.

Within a tier, ``score = section_weight * proximity_bonus + bm25`` with
section weights Title 3.0 / Abstract 2.0 / other 1.0.  The proximity
bonus is ``1 / (1 + d)`` for the closest same-passage pair of query-term
hits (token distance ``d``), 0 when no two terms share a passage, and 1
when the query has a single matching term (section weight then applies
directly).  BM25 uses k1=1.2, b=0.75 over the query's keyword terms.
Ties break by publication year, then PMID, newest/highest first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .docmodel import RelationType, SectionKind
from .errors import BadPage
from .index import DocMeta, IndexSnapshot
from .querylang import And, Entity, Keyword, Node, Not, Or, Phrase, RelationTerm
from .text import STOPWORDS, fold_token, sentence_index, split_sentences, tokenize

SECTION_WEIGHTS = {
    SectionKind.TITLE.value: 3.0,
    SectionKind.ABSTRACT.value: 2.0,
}
DEFAULT_SECTION_WEIGHT = 1.0

BM25_K1 = 1.2
BM25_B = 0.75

SNIPPET_WIDTH = 240
ELLIPSIS = "…"

TIER_RELATION = 3
TIER_SENTENCE = 2
TIER_DOCUMENT = 1
TIER_KEYWORD = 0


def section_weight(section: str) -> float:
    return SECTION_WEIGHTS.get(section, DEFAULT_SECTION_WEIGHT)


def bm25_idf(n_docs: int, df: int) -> float:
    return math.log(1.0 + (n_docs - df + 0.5) / (df + 0.5))


def bm25_term(tf: int, df: int, n_docs: int, dl: int, avgdl: float) -> float:
    if tf == 0 or df == 0 or avgdl == 0:
        return 0.0
    norm = BM25_K1 * (1.0 - BM25_B + BM25_B * dl / avgdl)
    return bm25_idf(n_docs, df) * tf * (BM25_K1 + 1.0) / (tf + norm)


@dataclass(frozen=True)
class Occurrence:
    """One place a query term matched inside a document."""

    passage_index: int
    section: str
    sentence_id: int
    token_pos: int
    start: int
    length: int


@dataclass(frozen=True)
class TermHits:
    """Occurrences of one query term (entity lists carry their key)."""

    kind: str  # "entity" | "keyword" | "phrase"
    key: str | None
    occurrences: tuple[Occurrence, ...]


@dataclass(frozen=True)
class Snippet:
    text: str
    highlights: tuple[tuple[int, int], ...] = ()


@dataclass(frozen=True)
class RankedHit:
    pmid: int
    tier: int
    score: float
    matched_section: str
    snippet: Snippet = Snippet("")


@dataclass(frozen=True)
class Filters:
    journal: str | None = None
    section: str | None = None
    pub_type: str | None = None
    year: int | None = None


@dataclass(frozen=True)
class SearchResult:
    hits: tuple[RankedHit, ...]
    total: int
    facets: dict[str, dict[str, int]]
    histogram: dict[int, int]
    diagnostics: tuple[str, ...] = ()


@dataclass(frozen=True)
class MatchInfo:
    """Everything score_document needs about one matched document."""

    pmid: int
    term_hits: tuple[TermHits, ...]
    relation_hit: bool
    keyword_tfs: tuple[tuple[int, int], ...]  # (tf, df) per keyword token
    dl: int
    n_docs: int
    avgdl: float


# --- query-shape helpers ------------------------------------------------------


def positive_terms(node: Node) -> list[Node]:
    """Leaf terms not under negation, in syntax order."""
    out: list[Node] = []

    def walk(n: Node, negated: bool):
        if isinstance(n, Not):
            walk(n.child, not negated)
        elif isinstance(n, (And, Or)):
            for c in n.children:
                walk(c, negated)
        elif not negated:
            out.append(n)

    walk(node, False)
    return out


def query_entity_keys(terms: list[Node]) -> list[str]:
    """Distinct entity keys among positive terms, in query order."""
    keys: list[str] = []
    for t in terms:
        if isinstance(t, Entity) and t.key not in keys:
            keys.append(t.key)
        elif isinstance(t, RelationTerm):
            for endpoint in (t.e1, t.e2):
                if endpoint.startswith("@") and endpoint not in keys:
                    keys.append(endpoint)
    return keys


def named_relation_type(terms: list[Node]) -> RelationType | None:
    for t in terms:
        if isinstance(t, RelationTerm) and t.rtype is not None:
            return t.rtype
    return None


# --- match sets ----------------------------------------------------------------


def _passage_positions(
    snapshot: IndexSnapshot, term: str, pmid: int, passage_index: int
) -> set[int]:
    for p in snapshot.keyword_postings.get(term, ()):
        if p.pmid == pmid and p.passage_index == passage_index:
            return set(p.positions)
    return set()


def _phrase_match_positions(
    snapshot: IndexSnapshot, phrase: Phrase, pmid: int | None = None
) -> list[tuple[int, int, int]]:
    """(pmid, passage_index, first-token position) of every phrase match.

    Stopword tokens inside the phrase are unindexed; the remaining tokens
    must sit at their original relative offsets.
    """
    folded = [fold_token(t) for t in phrase.terms]
    anchored = [(i, t) for i, t in enumerate(folded) if t not in STOPWORDS]
    if not anchored:
        return []
    first_off, first_term = anchored[0]
    out = []
    for posting in snapshot.keyword_postings.get(first_term, ()):
        if pmid is not None and posting.pmid != pmid:
            continue
        rest = [
            (off, _passage_positions(snapshot, term, posting.pmid, posting.passage_index))
            for off, term in anchored[1:]
        ]
        for pos in posting.positions:
            if pos < first_off:
                continue
            if all(pos - first_off + off in positions for off, positions in rest):
                out.append((posting.pmid, posting.passage_index, pos - first_off))
    return out


def _relation_term_pmids(snapshot: IndexSnapshot, term: RelationTerm) -> set[int]:
    from .index import lookup_relations

    out: set[int] = set()
    for h in lookup_relations(snapshot, term.e1, term.rtype, term.e2):
        out.update(h.pmids)
    return out


def match_set(node: Node, snapshot: IndexSnapshot, diagnostics: list[str]) -> set[int]:
    universe = set(snapshot.docs)
    if isinstance(node, Keyword):
        term = fold_token(node.term)
        return {p.pmid for p in snapshot.keyword_postings.get(term, ())}
    if isinstance(node, Phrase):
        return {pmid for pmid, _, _ in _phrase_match_positions(snapshot, node)}
    if isinstance(node, Entity):
        posts = snapshot.entity_postings.get(node.key)
        if not posts:
            if snapshot.trie.lookup_exact(node.key) is None and not any(
                d.semantic_key == node.key for d in snapshot.dictionary
            ):
                diagnostics.append(f"unknown entity: {node.key}")
            return set()
        return {p.pmid for p in posts}
    if isinstance(node, RelationTerm):
        return _relation_term_pmids(snapshot, node)
    if isinstance(node, And):
        result = universe
        for c in node.children:
            result = result & match_set(c, snapshot, diagnostics)
        return result
    if isinstance(node, Or):
        result: set[int] = set()
        for c in node.children:
            result = result | match_set(c, snapshot, diagnostics)
        return result
    if isinstance(node, Not):
        return universe - match_set(node.child, snapshot, diagnostics)
    raise TypeError(f"unknown node {node!r}")


# --- per-document occurrences ----------------------------------------------------


def _passage_context(meta: DocMeta, passage_index: int):
    p_start, p_end = meta.passage_span(passage_index)
    text = meta.text[p_start:p_end]
    return p_start, tokenize(text), split_sentences(text)


def _keyword_occurrences(snapshot: IndexSnapshot, pmid: int, word: str) -> tuple[Occurrence, ...]:
    folded = fold_token(word)
    meta = snapshot.docs[pmid]
    out = []
    for posting in snapshot.keyword_postings.get(folded, ()):
        if posting.pmid != pmid:
            continue
        p_start, tokens, sentences = _passage_context(meta, posting.passage_index)
        for pos in posting.positions:
            tok = tokens[pos]
            out.append(
                Occurrence(
                    passage_index=posting.passage_index,
                    section=posting.section,
                    sentence_id=sentence_index(sentences, tok.start),
                    token_pos=pos,
                    start=p_start + tok.start,
                    length=tok.end - tok.start,
                )
            )
    out.sort(key=lambda o: (o.passage_index, o.token_pos))
    return tuple(out)


def _phrase_occurrences(snapshot: IndexSnapshot, pmid: int, phrase: Phrase) -> tuple[Occurrence, ...]:
    meta = snapshot.docs[pmid]
    out = []
    for _pmid, passage_index, pos in _phrase_match_positions(snapshot, phrase, pmid):
        p_start, tokens, sentences = _passage_context(meta, passage_index)
        last = min(pos + len(phrase.terms) - 1, len(tokens) - 1)
        start_tok, end_tok = tokens[pos], tokens[last]
        section = meta.passages[passage_index][0]
        out.append(
            Occurrence(
                passage_index=passage_index,
                section=section,
                sentence_id=sentence_index(sentences, start_tok.start),
                token_pos=pos,
                start=p_start + start_tok.start,
                length=end_tok.end - start_tok.start,
            )
        )
    out.sort(key=lambda o: (o.passage_index, o.token_pos))
    return tuple(out)


def _entity_occurrences(snapshot: IndexSnapshot, pmid: int, key: str) -> tuple[Occurrence, ...]:
    out = [
        Occurrence(
            passage_index=p.passage_index,
            section=p.section,
            sentence_id=p.sentence_id,
            token_pos=p.token_pos,
            start=p.start,
            length=p.length,
        )
        for p in snapshot.entity_postings.get(key, ())
        if p.pmid == pmid
    ]
    out.sort(key=lambda o: (o.passage_index, o.token_pos))
    return tuple(out)


def term_hits_for(snapshot: IndexSnapshot, pmid: int, term: Node) -> list[TermHits]:
    """Hit lists contributed by one positive term (a relation term
    contributes one list per concrete endpoint)."""
    if isinstance(term, Keyword):
        return [TermHits("keyword", None, _keyword_occurrences(snapshot, pmid, term.term))]
    if isinstance(term, Phrase):
        return [TermHits("phrase", None, _phrase_occurrences(snapshot, pmid, term))]
    if isinstance(term, Entity):
        return [TermHits("entity", term.key, _entity_occurrences(snapshot, pmid, term.key))]
    if isinstance(term, RelationTerm):
        return [
            TermHits("entity", endpoint, _entity_occurrences(snapshot, pmid, endpoint))
            for endpoint in (term.e1, term.e2)
            if endpoint.startswith("@")
        ]
    return []


# --- scoring ----------------------------------------------------------------------


def best_pair(
    term_hits: tuple[TermHits, ...],
) -> tuple[float, Occurrence | None, Occurrence | None]:
    """Best ``section_weight * proximity`` over same-passage cross-term
    pairs; single populated term scores its best section at proximity 1.

    Iteration order is fixed (terms in query order, occurrences by
    position) so equal-valued candidates resolve deterministically.
    """
    populated = [th.occurrences for th in term_hits if th.occurrences]
    if not populated:
        return (0.0, None, None)
    if len(populated) == 1:
        top = None
        for occ in populated[0]:
            if top is None or section_weight(occ.section) > section_weight(top.section):
                top = occ
        return (section_weight(top.section), top, None)
    best_value = 0.0
    best_a = best_b = None
    for i in range(len(populated)):
        for j in range(i + 1, len(populated)):
            for a in populated[i]:
                for b in populated[j]:
                    if a.passage_index != b.passage_index:
                        continue
                    dist = abs(a.token_pos - b.token_pos)
                    value = section_weight(a.section) * (1.0 / (1.0 + dist))
                    if value > best_value:
                        best_value, best_a, best_b = value, a, b
    if best_a is None:
        top = None
        for occurrences in populated:
            for occ in occurrences:
                if top is None or section_weight(occ.section) > section_weight(top.section):
                    top = occ
        return (0.0, top, None)
    return (best_value, best_a, best_b)


def _entities_share_sentence(term_hits: tuple[TermHits, ...]) -> bool:
    by_sentence: dict[tuple[int, int], set[str]] = {}
    for th in term_hits:
        if th.kind != "entity" or th.key is None:
            continue
        for occ in th.occurrences:
            by_sentence.setdefault((occ.passage_index, occ.sentence_id), set()).add(th.key)
    return any(len(keys) >= 2 for keys in by_sentence.values())


def score_document(info: MatchInfo) -> tuple[int, float, str]:
    """(tier, score, matched_section) for one matched document."""
    present_keys = {
        th.key for th in info.term_hits if th.kind == "entity" and th.occurrences
    }
    if info.relation_hit:
        tier = TIER_RELATION
    elif len(present_keys) >= 2 and _entities_share_sentence(info.term_hits):
        tier = TIER_SENTENCE
    elif present_keys:
        tier = TIER_DOCUMENT
    else:
        tier = TIER_KEYWORD
    value, occ_a, _ = best_pair(info.term_hits)
    bm25 = 0.0
    for tf, df in info.keyword_tfs:
        bm25 += bm25_term(tf, df, info.n_docs, info.dl, info.avgdl)
    section = occ_a.section if occ_a is not None else SectionKind.OTHER.value
    return tier, value + bm25, section


# --- snippets ----------------------------------------------------------------------


def make_snippet(
    meta: DocMeta,
    anchor: Occurrence | None,
    partner: Occurrence | None,
    all_spans: list[tuple[int, int]],
    width: int = SNIPPET_WIDTH,
) -> Snippet:
    """Sentence-extended window around the best match, trimmed to width."""
    if anchor is None:
        trimmed = len(meta.text) > width
        return Snippet(meta.text[:width] + (ELLIPSIS if trimmed else ""), ())
    p_start, p_end = meta.passage_span(anchor.passage_index)
    sentences = split_sentences(meta.text[p_start:p_end])

    def sentence_span(occ: Occurrence) -> tuple[int, int]:
        if not sentences:
            return (p_start, p_end)
        s, e = sentences[sentence_index(sentences, occ.start - p_start)]
        return (p_start + s, p_start + e)

    lo, hi = sentence_span(anchor)
    if partner is not None and partner.passage_index == anchor.passage_index:
        plo, phi = sentence_span(partner)
        lo, hi = min(lo, plo), max(hi, phi)
    leading = trailing = False
    if hi - lo > width:
        center = anchor.start + anchor.length // 2
        lo_new = max(p_start, center - width // 2)
        hi_new = min(p_end, lo_new + width)
        lo_new = max(p_start, hi_new - width)
        leading, trailing = lo_new > lo, hi_new < hi
        lo, hi = lo_new, hi_new
    prefix = ELLIPSIS if leading else ""
    suffix = ELLIPSIS if trailing else ""
    spans = []
    for start, length in sorted(set(all_spans)):
        if start >= lo and start + length <= hi:
            spans.append((start - lo + len(prefix), length))
    merged: list[tuple[int, int]] = []
    for start, length in spans:
        if merged and start < merged[-1][0] + merged[-1][1]:
            prev_start, prev_len = merged[-1]
            merged[-1] = (prev_start, max(prev_len, start + length - prev_start))
        else:
            merged.append((start, length))
    return Snippet(prefix + meta.text[lo:hi] + suffix, tuple(merged))


# --- execute ----------------------------------------------------------------------


def _doc_match_info(
    snapshot: IndexSnapshot,
    pmid: int,
    terms: list[Node],
    named_rtype: RelationType | None,
    keys: list[str],
) -> MatchInfo:
    term_hits: list[TermHits] = []
    for t in terms:
        term_hits.extend(term_hits_for(snapshot, pmid, t))
    present = [k for k in keys if snapshot.entity_postings.get(k) and pmid in snapshot.entity_pmids(k)]
    relation_hit = any(
        isinstance(t, RelationTerm) and pmid in _relation_term_pmids(snapshot, t)
        for t in terms
    )
    if not relation_hit:
        for i in range(len(present)):
            for j in range(i + 1, len(present)):
                if pmid in snapshot.has_relation_between(present[i], present[j], named_rtype):
                    relation_hit = True
                    break
            if relation_hit:
                break
    keyword_tfs: list[tuple[int, int]] = []
    for t in terms:
        words = [t.term] if isinstance(t, Keyword) else list(t.terms) if isinstance(t, Phrase) else []
        for w in words:
            folded = fold_token(w)
            posts = snapshot.keyword_postings.get(folded, ())
            tf = sum(len(p.positions) for p in posts if p.pmid == pmid)
            df = len({p.pmid for p in posts})
            keyword_tfs.append((tf, df))
    return MatchInfo(
        pmid=pmid,
        term_hits=tuple(term_hits),
        relation_hit=relation_hit,
        keyword_tfs=tuple(keyword_tfs),
        dl=snapshot.doc_lengths.get(pmid, 0),
        n_docs=len(snapshot.docs),
        avgdl=snapshot.average_doc_length(),
    )


def rank_matches(
    snapshot: IndexSnapshot, ast: Node, matched: set[int]
) -> list[tuple[int, int, float, str, MatchInfo]]:
    """(pmid, tier, score, section, info) rows in final ranking order."""
    terms = positive_terms(ast)
    keys = query_entity_keys(terms)
    named_rtype = named_relation_type(terms)
    rows = []
    for pmid in sorted(matched):
        info = _doc_match_info(snapshot, pmid, terms, named_rtype, keys)
        tier, score, section = score_document(info)
        rows.append((pmid, tier, score, section, info))
    rows.sort(key=lambda r: (-r[1], -r[2], -snapshot.year_index.get(r[0], 0), -r[0]))
    return rows


def execute(
    ast: Node,
    snapshot: IndexSnapshot,
    filters: Filters | None = None,
    page: tuple[int, int] = (0, 10),
) -> SearchResult:
    offset, size = page
    if offset < 0 or size < 1 or size > 100:
        raise BadPage(f"bad page ({offset}, {size})")
    filters = filters or Filters()
    diagnostics: list[str] = []
    matched = match_set(ast, snapshot, diagnostics)
    rows = rank_matches(snapshot, ast, matched)

    def keep(row) -> bool:
        pmid, _tier, _score, section, _info = row
        meta = snapshot.docs[pmid]
        if filters.journal is not None and meta.journal != filters.journal:
            return False
        if filters.pub_type is not None and filters.pub_type not in meta.pub_types:
            return False
        if filters.year is not None and meta.pub_year != filters.year:
            return False
        if filters.section is not None and section != filters.section:
            return False
        return True

    rows = [r for r in rows if keep(r)]
    facets: dict[str, dict[str, int]] = {"journal": {}, "section": {}, "pub_type": {}}
    histogram: dict[int, int] = {}
    for pmid, _tier, _score, section, _info in rows:
        meta = snapshot.docs[pmid]
        facets["journal"][meta.journal] = facets["journal"].get(meta.journal, 0) + 1
        facets["section"][section] = facets["section"].get(section, 0) + 1
        for pt in meta.pub_types:
            facets["pub_type"][pt] = facets["pub_type"].get(pt, 0) + 1
        histogram[meta.pub_year] = histogram.get(meta.pub_year, 0) + 1

    hits = []
    for pmid, tier, score, section, info in rows[offset : offset + size]:
        meta = snapshot.docs[pmid]
        _value, occ_a, occ_b = best_pair(info.term_hits)
        spans = [(o.start, o.length) for th in info.term_hits for o in th.occurrences]
        hits.append(
            RankedHit(
                pmid=pmid,
                tier=tier,
                score=score,
                matched_section=section,
                snippet=make_snippet(meta, occ_a, occ_b, spans),
            )
        )
    return SearchResult(
        hits=tuple(hits),
        total=len(rows),
        facets={k: dict(sorted(v.items())) for k, v in facets.items()},
        histogram=dict(sorted(histogram.items())),
        diagnostics=tuple(diagnostics),
    )
