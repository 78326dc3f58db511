"""Tab-delimited exchange format for title+abstract articles.

Layout per document::

    PMID|t|<title>
    PMID|a|<abstract>
    PMID<TAB>start<TAB>end<TAB>text<TAB>type<TAB>namespace:id
    ...
    PMID<TAB>rtype<TAB>e1<TAB>e2

Annotation lines are ordered by start offset, relation lines by relation
type.  Relation type tokens are upper-case in file mode and lower-case in
API mode.  Documents with passages beyond title/abstract cannot round-trip;
those passages are flagged with a warning marker line and skipped.
"""

from __future__ import annotations

from .docmodel import (
    Document,
    EntityAnnotation,
    EntityType,
    Identifier,
    Passage,
    Relation,
    RelationType,
    SectionKind,
    make_semantic_key,
)
from .errors import MarkupError, SchemaError

WARNING_MARKER = "##"


def to_pubtator_tsv(
    doc: Document,
    relations: list[Relation] | None = None,
    *,
    lowercase_relations: bool = False,
) -> str:
    """Render one document (and its relations) as exchange-format text."""
    doc.validate()
    relations = relations or []
    for rel in relations:
        if rel.pmid != doc.pmid:
            raise SchemaError(
                f"relation pmid {rel.pmid} does not match document {doc.pmid}"
            )
    lines = [f"{doc.pmid}|t|{doc.title}"]
    abstract = doc.abstract
    if abstract or any(
        p.section_kind is SectionKind.ABSTRACT for p in doc.passages
    ):
        lines.append(f"{doc.pmid}|a|{abstract}")
    annotations: list[EntityAnnotation] = []
    for i, p in enumerate(doc.passages):
        if p.section_kind in (SectionKind.TITLE, SectionKind.ABSTRACT):
            annotations.extend(p.annotations)
        else:
            lines.append(
                f"{WARNING_MARKER} {doc.pmid}: passage {i}"
                f" ({p.section_kind.value}) not representable; skipped"
            )
    for ann in sorted(annotations, key=lambda a: (a.start, a.end)):
        lines.append(
            f"{doc.pmid}\t{ann.start}\t{ann.end}\t{ann.text}"
            f"\t{ann.etype.value}\t{ann.identifier}"
        )
    for rel in sorted(relations, key=lambda r: (r.rtype.value, r.e1, r.e2)):
        token = rel.rtype.value.lower() if lowercase_relations else rel.rtype.value
        lines.append(f"{doc.pmid}\t{token}\t{rel.e1}\t{rel.e2}")
    return "\n".join(lines) + "\n"


def corpus_to_pubtator_tsv(
    docs: list[Document],
    relations_by_pmid: dict[int, list[Relation]] | None = None,
    *,
    lowercase_relations: bool = False,
) -> str:
    """Concatenate per-document blocks separated by blank lines."""
    blocks = [
        to_pubtator_tsv(
            d,
            (relations_by_pmid or {}).get(d.pmid),
            lowercase_relations=lowercase_relations,
        )
        for d in docs
    ]
    return "\n".join(blocks)


def _parse_relation_line(parts: list[str], pmid: int) -> Relation:
    try:
        rtype = RelationType(parts[1].upper())
    except ValueError:
        raise MarkupError(f"unknown relation type token: {parts[1]!r}") from None
    return Relation(pmid, rtype, parts[2], parts[3])


def from_pubtator_tsv(text: str) -> list[tuple[Document, list[Relation]]]:
    """Parse exchange-format text back into title+abstract documents."""
    results: list[tuple[Document, list[Relation]]] = []
    pmid: int | None = None
    title = ""
    abstract: str | None = None
    annotations: list[EntityAnnotation] = []
    relations: list[Relation] = []

    def flush():
        nonlocal pmid, title, abstract, annotations, relations
        if pmid is None:
            return
        if not title:
            raise SchemaError(f"document {pmid} has no title line")
        passages = [Passage(SectionKind.TITLE, title, 0)]
        if abstract is not None:
            passages.append(Passage(SectionKind.ABSTRACT, abstract, len(title) + 1))
        by_passage: list[list[EntityAnnotation]] = [[] for _ in passages]
        for ann in annotations:
            placed = False
            for i, p in enumerate(passages):
                if p.offset <= ann.start and ann.start + ann.length <= p.end:
                    by_passage[i].append(ann)
                    placed = True
                    break
            if not placed:
                raise MarkupError(
                    f"annotation at {ann.start} outside document {pmid}"
                )
        doc = Document(
            pmid=pmid,
            title=title,
            passages=tuple(
                Passage(p.section_kind, p.text, p.offset, tuple(anns))
                for p, anns in zip(passages, by_passage)
            ),
        )
        doc.validate()
        results.append((doc, relations))
        pmid, title, abstract, annotations, relations = None, "", None, [], []

    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.startswith(WARNING_MARKER):
            continue
        if "|" in line.split("\t", 1)[0]:
            head, sep, payload = line.partition("|")
            kind, sep2, body = payload.partition("|")
            if not sep or not sep2 or kind not in ("t", "a"):
                raise MarkupError(f"line {lineno}: malformed header line")
            line_pmid = int(head)
            if kind == "t":
                flush()
                pmid = line_pmid
                title = body
            else:
                if pmid != line_pmid:
                    raise MarkupError(f"line {lineno}: abstract before title")
                abstract = body
            continue
        parts = line.split("\t")
        if pmid is None or int(parts[0]) != pmid:
            raise MarkupError(f"line {lineno}: record outside any document")
        if len(parts) == 6:
            start, end = int(parts[1]), int(parts[2])
            try:
                etype = EntityType(parts[4])
            except ValueError:
                raise MarkupError(f"line {lineno}: unknown entity type") from None
            annotations.append(
                EntityAnnotation(
                    start=start,
                    length=end - start,
                    text=parts[3],
                    etype=etype,
                    identifier=Identifier.parse(parts[5]),
                    semantic_key=make_semantic_key(etype, parts[3]),
                )
            )
        elif len(parts) == 4:
            relations.append(_parse_relation_line(parts, pmid))
        else:
            raise MarkupError(f"line {lineno}: unrecognized record shape")
    flush()
    return results
