"""Deterministic annotation pipeline.

Three stages per document: parenthetical abbreviation detection, greedy
longest-match lexicon tagging (with abbreviation short forms inheriting
the identifier of their defined long form), and rule-based relation
extraction over title/abstract sentences.  A trigger rule fires when two
entities of the required types share a sentence with one of the rule's
lemmas between or adjacent to them.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .abbrev import AbbrevPair, detect_abbreviations
from .docmodel import (
    Document,
    EntityAnnotation,
    EntityType,
    Identifier,
    Namespace,
    Passage,
    Relation,
    RelationType,
    SectionKind,
    TYPE_PRIORITY,
    make_semantic_key,
    validate_relation_schema,
)
from .errors import BiolitError, SchemaError
from .lexicon import Lexicon, LexiconEntry
from .text import Token, fold_term, fold_token, split_sentences, tokenize

# Characters allowed between consecutive matched sub-tokens of one mention.
_GAP_OK = re.compile(r"[\s\-()/]*\Z")

_PRIORITY_RANK = {t: i for i, t in enumerate(TYPE_PRIORITY)}

RS_VARIANT_RE = re.compile(r"\brs\d+\b")
HGVS_VARIANT_RE = re.compile(
    r"\b(?:[cg]\.\d+(?:_\d+)?[ACGT]>[ACGT]|p\.[A-Z][a-z]{2}\d+[A-Z][a-z]{2})"
)


@dataclass(frozen=True)
class TriggerRule:
    """One relation-extraction rule, scoped to a single sentence."""

    rtype: RelationType
    lemmas: tuple[str, ...]
    pair: frozenset[EntityType]

    def __post_init__(self):
        types = sorted(self.pair, key=lambda t: t.value)
        t1 = types[0]
        t2 = types[-1]
        if not validate_relation_schema(self.rtype, t1, t2):
            raise SchemaError(
                f"rule pair {t1.value}/{t2.value} not allowed for {self.rtype.value}"
            )


def parse_rules(text: str) -> list[TriggerRule]:
    """Parse the rules file: ``rtype<TAB>lemma1|lemma2<TAB>Type1/Type2``."""
    rules = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.rstrip("\n")
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise SchemaError(f"rules line {lineno}: expected 3 fields")
        try:
            rtype = RelationType(parts[0].upper())
        except ValueError:
            raise SchemaError(f"rules line {lineno}: unknown relation type") from None
        lemmas = tuple(fold_token(l) for l in parts[1].split("|") if l)
        if not lemmas:
            raise SchemaError(f"rules line {lineno}: no trigger lemmas")
        try:
            types = [EntityType(t) for t in parts[2].split("/")]
        except ValueError:
            raise SchemaError(f"rules line {lineno}: unknown entity type") from None
        if len(types) != 2:
            raise SchemaError(f"rules line {lineno}: pair must name two types")
        rules.append(TriggerRule(rtype, lemmas, frozenset(types)))
    return rules


def load_rules(path: str) -> list[TriggerRule]:
    with open(path, encoding="utf-8") as fh:
        return parse_rules(fh.read())


@dataclass(frozen=True)
class _SubTok:
    folded: str
    start: int
    end: int


def _subtoken_stream(text: str) -> list[_SubTok]:
    out = []
    for tok in tokenize(text):
        pos = tok.start
        for part in tok.text.split("-"):
            if part:
                out.append(_SubTok(fold_token(part), pos, pos + len(part)))
            pos += len(part) + 1
    return out


class _Matcher:
    """Token-sequence dictionary matcher shared by lexicon and doc-local
    abbreviation entries."""

    def __init__(self):
        # first subtoken -> [(subtoken tuple, entry)] sorted longest first
        self._by_first: dict[str, list[tuple[tuple[str, ...], LexiconEntry]]] = {}

    def add(self, tokens: tuple[str, ...], entry: LexiconEntry) -> None:
        if not tokens:
            return
        bucket = self._by_first.setdefault(tokens[0], [])
        for existing_tokens, existing in bucket:
            if (
                existing_tokens == tokens
                and existing.etype is entry.etype
            ):
                return  # lexicon entry wins over doc-local duplicates
        bucket.append((tokens, entry))
        bucket.sort(key=lambda pair: (-len(pair[0]), _PRIORITY_RANK[pair[1].etype]))

    @classmethod
    def from_lexicon(cls, lex: Lexicon) -> "_Matcher":
        m = cls()
        for tokens, entry in lex.surface_token_lists():
            m.add(tokens, entry)
        return m

    def match_at(self, stream: list[_SubTok], i: int, text: str):
        """Longest entry matching at stream position ``i``, if any."""
        bucket = self._by_first.get(stream[i].folded)
        if not bucket:
            return None
        for tokens, entry in bucket:
            if i + len(tokens) > len(stream):
                continue
            ok = True
            for k in range(1, len(tokens)):
                prev = stream[i + k - 1]
                cur = stream[i + k]
                if cur.folded != tokens[k] or not _GAP_OK.match(
                    text[prev.end : cur.start]
                ):
                    ok = False
                    break
            if ok:
                return len(tokens), entry
        return None


def _variant_annotations(
    text: str, offset: int, taken: list[tuple[int, int]]
) -> list[EntityAnnotation]:
    """Pattern-recognized genetic variants (dbSNP rs-ids and simple HGVS)."""
    out = []
    for regex, namespace in ((RS_VARIANT_RE, Namespace.DBSNP), (HGVS_VARIANT_RE, Namespace.HGNC)):
        for m in regex.finditer(text):
            span = (offset + m.start(), offset + m.end())
            if any(s < span[1] and span[0] < e for s, e in taken):
                continue
            mention = m.group(0)
            out.append(
                EntityAnnotation(
                    start=span[0],
                    length=len(mention),
                    text=mention,
                    etype=EntityType.VARIANT,
                    identifier=Identifier(namespace, mention),
                    semantic_key=make_semantic_key(EntityType.VARIANT, mention),
                )
            )
            taken.append(span)
    return out


def _doc_local_entries(doc: Document, lex: Lexicon) -> list[LexiconEntry]:
    """Short forms inheriting the identity of a lexicon-known long form."""
    entries = []
    for pair in detect_abbreviations(doc):
        target = lex.lookup(pair.long_form)
        if target is None:
            continue
        entries.append(
            LexiconEntry(pair.short_form, target.etype, target.identifier, target.preferred_name)
        )
    return entries


def tag_entities(doc: Document, lex: Lexicon) -> Document:
    """Return a copy of ``doc`` with annotations populated."""
    doc.validate()
    matcher = _Matcher.from_lexicon(lex)
    for entry in _doc_local_entries(doc, lex):
        matcher.add(tuple(fold_term(entry.surface).split()), entry)

    passages = []
    for passage in doc.passages:
        stream = _subtoken_stream(passage.text)
        annotations: list[EntityAnnotation] = []
        taken: list[tuple[int, int]] = []
        i = 0
        while i < len(stream):
            hit = matcher.match_at(stream, i, passage.text)
            if hit is None:
                i += 1
                continue
            width, entry = hit
            start = stream[i].start
            end = stream[i + width - 1].end
            annotations.append(
                EntityAnnotation(
                    start=passage.offset + start,
                    length=end - start,
                    text=passage.text[start:end],
                    etype=entry.etype,
                    identifier=entry.identifier,
                    semantic_key=entry.semantic_key,
                )
            )
            taken.append((passage.offset + start, passage.offset + end))
            i += width
        annotations.extend(
            _variant_annotations(passage.text, passage.offset, taken)
        )
        annotations.sort(key=lambda a: (a.start, a.end))
        passages.append(
            Passage(passage.section_kind, passage.text, passage.offset, tuple(annotations))
        )
    tagged = Document(
        pmid=doc.pmid,
        title=doc.title,
        journal=doc.journal,
        pub_year=doc.pub_year,
        pub_types=doc.pub_types,
        pmcid=doc.pmcid,
        passages=tuple(passages),
    )
    tagged.validate()
    return tagged


def _token_range(tokens: list[Token], start: int, end: int) -> tuple[int, int]:
    """Indices of the tokens overlapping the character span [start, end)."""
    first = last = None
    for i, tok in enumerate(tokens):
        if tok.end > start and tok.start < end:
            if first is None:
                first = i
            last = i
    if first is None:
        return (0, 0)
    return (first, last + 1)


def extract_relations(doc: Document, rules: list[TriggerRule]) -> list[Relation]:
    """Relations found in title/abstract sentences, canonical and deduped."""
    found: dict[tuple[RelationType, str, str], set[int]] = {}
    for pidx, passage in enumerate(doc.passages):
        if passage.section_kind not in (SectionKind.TITLE, SectionKind.ABSTRACT):
            continue
        for s_start, s_end in split_sentences(passage.text):
            sent_tokens = [
                t for t in tokenize(passage.text) if t.start >= s_start and t.end <= s_end
            ]
            folded = [t.folded for t in sent_tokens]
            entities = [
                a
                for a in passage.annotations
                if a.start - passage.offset >= s_start
                and a.end - passage.offset <= s_end
            ]
            if len(entities) < 2:
                continue
            ranges = {
                id(a): _token_range(sent_tokens, a.start - passage.offset, a.end - passage.offset)
                for a in entities
            }
            for rule in rules:
                trigger_positions = [
                    i for i, f in enumerate(folded) if f in rule.lemmas
                ]
                if not trigger_positions:
                    continue
                for x in range(len(entities)):
                    for y in range(x + 1, len(entities)):
                        a, b = entities[x], entities[y]
                        if a.semantic_key == b.semantic_key:
                            continue
                        if frozenset((a.etype, b.etype)) != rule.pair:
                            continue
                        lo, hi = sorted((ranges[id(a)], ranges[id(b)]))
                        hit = any(
                            (lo[1] <= t < hi[0]) or t == lo[0] - 1 or t == hi[1]
                            for t in trigger_positions
                        )
                        if not hit:
                            continue
                        rel = Relation.make(doc.pmid, rule.rtype, a.semantic_key, b.semantic_key)
                        found.setdefault(rel.triple(), set()).add(pidx)
    out = [
        Relation(doc.pmid, rtype, e1, e2, tuple(sorted(evidence)))
        for (rtype, e1, e2), evidence in found.items()
    ]
    out.sort(key=lambda r: (r.rtype.value, r.e1, r.e2))
    return out


@dataclass(frozen=True)
class PipelineStats:
    documents: int = 0
    failed: int = 0
    abbreviations: int = 0
    annotations: int = 0
    relations: int = 0


@dataclass(frozen=True)
class AnnotatedCorpus:
    """Pipeline output: annotated documents plus extracted relations."""

    documents: tuple[Document, ...] = ()
    relations: tuple[Relation, ...] = ()
    errors: tuple[tuple[int, str], ...] = ()
    stats: PipelineStats = field(default_factory=PipelineStats)

    def relations_for(self, pmid: int) -> list[Relation]:
        return [r for r in self.relations if r.pmid == pmid]


def run_pipeline(
    docs: list[Document], lex: Lexicon, rules: list[TriggerRule]
) -> AnnotatedCorpus:
    """Abbreviations, tagging, then relation extraction per document.

    Per-document failures are collected without aborting the batch.
    """
    annotated: list[Document] = []
    relations: list[Relation] = []
    errors: list[tuple[int, str]] = []
    n_abbrev = 0
    for doc in sorted(docs, key=lambda d: d.pmid):
        try:
            doc.validate()
            n_abbrev += len(detect_abbreviations(doc))
            tagged = tag_entities(doc, lex)
            relations.extend(extract_relations(tagged, rules))
            annotated.append(tagged)
        except BiolitError as exc:
            errors.append((doc.pmid, str(exc)))
    stats = PipelineStats(
        documents=len(annotated),
        failed=len(errors),
        abbreviations=n_abbrev,
        annotations=sum(len(d.all_annotations()) for d in annotated),
        relations=len(relations),
    )
    return AnnotatedCorpus(
        documents=tuple(annotated),
        relations=tuple(relations),
        errors=tuple(errors),
        stats=stats,
    )
