"""Reference ranking by linear scan, used as the testing ground truth.

Evaluates the same query semantics as :mod:`biolit.ranker` directly over
an annotated corpus, with no index structures: every document is
re-tokenized, corpus statistics are recomputed from scratch, and tiers,
scores and tie-breaks follow the documented rules.  The executor and this
scan must produce identical orderings.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .annotator import AnnotatedCorpus
from .docmodel import Document, RelationType, SectionKind, canonical_pair, key_entity_type
from .querylang import And, Entity, Keyword, Node, Not, Or, Phrase, RelationTerm
from .text import STOPWORDS, fold_token, sentence_index, split_sentences, tokenize

_SECTION_WEIGHTS = {"Title": 3.0, "Abstract": 2.0}
_K1 = 1.2
_B = 0.75


def _weight(section: str) -> float:
    return _SECTION_WEIGHTS.get(section, 1.0)


@dataclass(frozen=True)
class _Occ:
    passage_index: int
    section: str
    sentence_id: int
    token_pos: int


def _positive_terms(node: Node) -> list[Node]:
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


def _doc_tokens(doc: Document):
    """Per passage: (section value, folded tokens, token objects, sentences)."""
    out = []
    for p in doc.passages:
        tokens = tokenize(p.text)
        out.append(
            (p.section_kind.value, [t.folded for t in tokens], tokens, split_sentences(p.text))
        )
    return out


def _keyword_occs(doc_tokens, word: str) -> list[_Occ]:
    folded = fold_token(word)
    if folded in STOPWORDS:
        return []
    occs = []
    for pidx, (section, folded_tokens, tokens, sentences) in enumerate(doc_tokens):
        for i, f in enumerate(folded_tokens):
            if f == folded:
                occs.append(
                    _Occ(pidx, section, sentence_index(sentences, tokens[i].start), i)
                )
    return occs


def _phrase_occs(doc_tokens, phrase: Phrase) -> list[_Occ]:
    folded = [fold_token(t) for t in phrase.terms]
    anchored = [(i, t) for i, t in enumerate(folded) if t not in STOPWORDS]
    if not anchored:
        return []
    first_off, first_term = anchored[0]
    occs = []
    for pidx, (section, folded_tokens, tokens, sentences) in enumerate(doc_tokens):
        for pos, f in enumerate(folded_tokens):
            if f != first_term or pos < first_off:
                continue
            ok = True
            for off, term in anchored[1:]:
                k = pos - first_off + off
                if k >= len(folded_tokens) or folded_tokens[k] != term:
                    ok = False
                    break
            if ok:
                start_tok = tokens[pos - first_off]
                occs.append(
                    _Occ(pidx, section, sentence_index(sentences, start_tok.start), pos - first_off)
                )
    return occs


def _entity_occs(doc: Document, doc_tokens, key: str) -> list[_Occ]:
    occs = []
    for pidx, passage in enumerate(doc.passages):
        section, _folded, tokens, sentences = doc_tokens[pidx]
        for ann in passage.annotations:
            if ann.semantic_key != key:
                continue
            local = ann.start - passage.offset
            token_pos = next((i for i, t in enumerate(tokens) if t.end > local), len(tokens))
            occs.append(
                _Occ(pidx, section, sentence_index(sentences, local), token_pos)
            )
    return occs


def _relation_matches(
    relations, rtype: RelationType | None, e1: str, e2: str
) -> bool:
    def endpoint_ok(spec: str, key: str) -> bool:
        if spec.startswith("@"):
            return spec == key
        return key_entity_type(key).value == spec

    for rel in relations:
        if rtype is not None and rel.rtype is not rtype:
            continue
        if (endpoint_ok(e1, rel.e1) and endpoint_ok(e2, rel.e2)) or (
            endpoint_ok(e1, rel.e2) and endpoint_ok(e2, rel.e1)
        ):
            return True
    return False


def _doc_matches(node: Node, doc: Document, doc_tokens, relations) -> bool:
    if isinstance(node, Keyword):
        return bool(_keyword_occs(doc_tokens, node.term))
    if isinstance(node, Phrase):
        return bool(_phrase_occs(doc_tokens, node))
    if isinstance(node, Entity):
        return any(
            ann.semantic_key == node.key
            for p in doc.passages
            for ann in p.annotations
        )
    if isinstance(node, RelationTerm):
        return _relation_matches(relations, node.rtype, node.e1, node.e2)
    if isinstance(node, And):
        return all(_doc_matches(c, doc, doc_tokens, relations) for c in node.children)
    if isinstance(node, Or):
        return any(_doc_matches(c, doc, doc_tokens, relations) for c in node.children)
    if isinstance(node, Not):
        return not _doc_matches(node.child, doc, doc_tokens, relations)
    raise TypeError(f"unknown node {node!r}")


def _query_entity_keys(terms: list[Node]) -> list[str]:
    keys: list[str] = []
    for t in terms:
        if isinstance(t, Entity) and t.key not in keys:
            keys.append(t.key)
        elif isinstance(t, RelationTerm):
            for endpoint in (t.e1, t.e2):
                if endpoint.startswith("@") and endpoint not in keys:
                    keys.append(endpoint)
    return keys


def _named_rtype(terms: list[Node]) -> RelationType | None:
    for t in terms:
        if isinstance(t, RelationTerm) and t.rtype is not None:
            return t.rtype
    return None


def brute_force_rank(ast: Node, corpus: AnnotatedCorpus) -> list[int]:
    """Ground-truth ordering for ``execute`` on corpora of modest size."""
    docs = list(corpus.documents)
    n_docs = len(docs)
    doc_token_cache = {d.pmid: _doc_tokens(d) for d in docs}
    doc_lengths = {
        d.pmid: sum(len(tokens) for _, _, tokens, _ in doc_token_cache[d.pmid])
        for d in docs
    }
    avgdl = sum(doc_lengths.values()) / n_docs if n_docs else 0.0

    def df_of(word: str) -> int:
        folded = fold_token(word)
        if folded in STOPWORDS:
            return 0
        count = 0
        for d in docs:
            if any(folded in folded_tokens for _, folded_tokens, _, _ in doc_token_cache[d.pmid]):
                count += 1
        return count

    terms = _positive_terms(ast)
    keys = _query_entity_keys(terms)
    named = _named_rtype(terms)
    keyword_words = []
    for t in terms:
        if isinstance(t, Keyword):
            keyword_words.append(t.term)
        elif isinstance(t, Phrase):
            keyword_words.extend(t.terms)
    dfs = [df_of(w) for w in keyword_words]

    ranked = []
    for doc in docs:
        relations = corpus.relations_for(doc.pmid)
        doc_tokens = doc_token_cache[doc.pmid]
        if not _doc_matches(ast, doc, doc_tokens, relations):
            continue
        # occurrence lists per positive term, mirroring the executor
        occ_lists: list[tuple[str, str | None, list[_Occ]]] = []
        for t in terms:
            if isinstance(t, Keyword):
                occ_lists.append(("keyword", None, _keyword_occs(doc_tokens, t.term)))
            elif isinstance(t, Phrase):
                occ_lists.append(("phrase", None, _phrase_occs(doc_tokens, t)))
            elif isinstance(t, Entity):
                occ_lists.append(("entity", t.key, _entity_occs(doc, doc_tokens, t.key)))
            elif isinstance(t, RelationTerm):
                for endpoint in (t.e1, t.e2):
                    if endpoint.startswith("@"):
                        occ_lists.append(
                            ("entity", endpoint, _entity_occs(doc, doc_tokens, endpoint))
                        )
        present = [
            k
            for k in keys
            if any(
                ann.semantic_key == k for p in doc.passages for ann in p.annotations
            )
        ]
        relation_hit = any(
            isinstance(t, RelationTerm)
            and _relation_matches(relations, t.rtype, t.e1, t.e2)
            for t in terms
        )
        if not relation_hit:
            for i in range(len(present)):
                for j in range(i + 1, len(present)):
                    a, b = canonical_pair(present[i], present[j])
                    if any(
                        rel.e1 == a
                        and rel.e2 == b
                        and (named is None or rel.rtype is named)
                        for rel in relations
                    ):
                        relation_hit = True
                        break
                if relation_hit:
                    break
        by_sentence: dict[tuple[int, int], set[str]] = {}
        for kind, key, occs in occ_lists:
            if kind != "entity" or key is None:
                continue
            for occ in occs:
                by_sentence.setdefault((occ.passage_index, occ.sentence_id), set()).add(key)
        entities_share_sentence = any(len(v) >= 2 for v in by_sentence.values())
        present_set = {key for kind, key, occs in occ_lists if kind == "entity" and occs}
        if relation_hit:
            tier = 3
        elif len(present_set) >= 2 and entities_share_sentence:
            tier = 2
        elif present_set:
            tier = 1
        else:
            tier = 0
        populated = [occs for _, _, occs in occ_lists if occs]
        value = 0.0
        if len(populated) == 1:
            top = None
            for occ in populated[0]:
                if top is None or _weight(occ.section) > _weight(top.section):
                    top = occ
            value = _weight(top.section)
        elif populated:
            best_value = 0.0
            found = False
            for i in range(len(populated)):
                for j in range(i + 1, len(populated)):
                    for a in populated[i]:
                        for b in populated[j]:
                            if a.passage_index != b.passage_index:
                                continue
                            dist = abs(a.token_pos - b.token_pos)
                            candidate = _weight(a.section) * (1.0 / (1.0 + dist))
                            if candidate > best_value:
                                best_value = candidate
                                found = True
            value = best_value if found else 0.0
        bm25 = 0.0
        dl = doc_lengths[doc.pmid]
        for word, df in zip(keyword_words, dfs):
            folded = fold_token(word)
            if folded in STOPWORDS or df == 0 or avgdl == 0:
                continue
            tf = sum(
                sum(1 for f in folded_tokens if f == folded)
                for _, folded_tokens, _, _ in doc_tokens
            )
            if tf == 0:
                continue
            idf = math.log(1.0 + (n_docs - df + 0.5) / (df + 0.5))
            norm = _K1 * (1.0 - _B + _B * dl / avgdl)
            bm25 += idf * tf * (_K1 + 1.0) / (tf + norm)
        score = value + bm25
        ranked.append((doc.pmid, tier, score, doc.pub_year))
    ranked.sort(key=lambda r: (-r[1], -r[2], -r[3], -r[0]))
    return [pmid for pmid, _, _, _ in ranked]
