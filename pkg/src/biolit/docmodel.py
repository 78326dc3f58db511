"""Canonical in-memory document model.

A :class:`Document` is one article: a PMID, bibliographic metadata, and an
ordered list of passages carrying character offsets in whole-document
coordinates.  Entity mentions are :class:`EntityAnnotation` spans normalized
to a namespaced :class:`Identifier` and a semantic key of the shape
``@TYPE_Name``.  Typed entity pairs are :class:`Relation` values validated
against a fixed schema of allowed (relation type, entity-type pair)
combinations.

All values are immutable after construction and safe to share between
threads.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum

from .errors import OffsetError, SchemaError


class EntityType(str, Enum):
    """The six entity types the pipeline recognizes."""

    GENE = "Gene"
    DISEASE = "Disease"
    CHEMICAL = "Chemical"
    VARIANT = "Variant"
    SPECIES = "Species"
    CELLLINE = "CellLine"


# Order used when canonicalizing relation endpoints.
CANONICAL_TYPE_ORDER = (
    EntityType.CHEMICAL,
    EntityType.DISEASE,
    EntityType.GENE,
    EntityType.VARIANT,
    EntityType.SPECIES,
    EntityType.CELLLINE,
)
_TYPE_RANK = {t: i for i, t in enumerate(CANONICAL_TYPE_ORDER)}

# When one surface form is ambiguous across entity types, the higher
# priority type wins at tagging time.
TYPE_PRIORITY = (
    EntityType.GENE,
    EntityType.CHEMICAL,
    EntityType.DISEASE,
    EntityType.VARIANT,
    EntityType.SPECIES,
    EntityType.CELLLINE,
)


class Namespace(str, Enum):
    NCBI_GENE = "NCBIGene"
    MESH = "MeSH"
    DBSNP = "dbSNP"
    HGNC = "HGNC"
    NCBI_TAXONOMY = "NCBITaxonomy"
    CELLOSAURUS = "Cellosaurus"


# Which identifier namespaces are legal for each entity type.
NAMESPACES_FOR_TYPE = {
    EntityType.GENE: (Namespace.NCBI_GENE,),
    EntityType.DISEASE: (Namespace.MESH,),
    EntityType.CHEMICAL: (Namespace.MESH,),
    EntityType.VARIANT: (Namespace.DBSNP, Namespace.HGNC),
    EntityType.SPECIES: (Namespace.NCBI_TAXONOMY,),
    EntityType.CELLLINE: (Namespace.CELLOSAURUS,),
}


class SectionKind(str, Enum):
    TITLE = "Title"
    ABSTRACT = "Abstract"
    INTRO = "Intro"
    METHODS = "Methods"
    RESULTS = "Results"
    DISCUSSION = "Discussion"
    OTHER = "Other"


class RelationType(str, Enum):
    ASSOCIATE = "ASSOCIATE"
    CAUSE = "CAUSE"
    COMPARE = "COMPARE"
    COTREAT = "COTREAT"
    DRUG_INTERACT = "DRUG_INTERACT"
    INHIBIT = "INHIBIT"
    INTERACT = "INTERACT"
    NEGATIVE_CORRELATE = "NEGATIVE_CORRELATE"
    POSITIVE_CORRELATE = "POSITIVE_CORRELATE"
    PREVENT = "PREVENT"
    STIMULATE = "STIMULATE"
    TREAT = "TREAT"


SEMANTIC_KEY_RE = re.compile(
    r"@(GENE|DISEASE|CHEMICAL|VARIANT|SPECIES|CELLLINE)_[A-Za-z0-9_]+\Z"
)

_KEY_PREFIX_TO_TYPE = {
    "GENE": EntityType.GENE,
    "DISEASE": EntityType.DISEASE,
    "CHEMICAL": EntityType.CHEMICAL,
    "VARIANT": EntityType.VARIANT,
    "SPECIES": EntityType.SPECIES,
    "CELLLINE": EntityType.CELLLINE,
}


def make_semantic_key(etype: EntityType, preferred_name: str) -> str:
    """Build the ``@TYPE_Name`` key for an entity.

    Every non-alphanumeric character in the preferred name maps to ``_``,
    runs collapse to a single ``_``, and leading/trailing underscores are
    stripped: ``COVID-19`` becomes ``@DISEASE_COVID_19``.
    """
    name = re.sub(r"[^A-Za-z0-9]+", "_", preferred_name).strip("_")
    if not name:
        raise SchemaError(f"entity name {preferred_name!r} has no usable characters")
    return f"@{etype.name}_{name}"


def is_semantic_key(text: str) -> bool:
    return bool(SEMANTIC_KEY_RE.match(text))


def key_entity_type(key: str) -> EntityType:
    """Entity type encoded in a semantic key."""
    m = SEMANTIC_KEY_RE.match(key)
    if not m:
        raise SchemaError(f"malformed semantic key: {key!r}")
    return _KEY_PREFIX_TO_TYPE[m.group(1)]


def canonical_pair(e1: str, e2: str) -> tuple[str, str]:
    """Order two semantic keys canonically.

    Sorts by entity-type rank (Chemical < Disease < Gene < Variant <
    Species < CellLine), then lexicographically, so an unordered entity
    pair always serializes the same way.
    """
    k1 = (_TYPE_RANK[key_entity_type(e1)], e1)
    k2 = (_TYPE_RANK[key_entity_type(e2)], e2)
    return (e1, e2) if k1 <= k2 else (e2, e1)


@dataclass(frozen=True)
class Identifier:
    """A namespaced database identifier, e.g. ``MeSH:D013629``."""

    namespace: Namespace
    id: str

    def __str__(self) -> str:
        return f"{self.namespace.value}:{self.id}"

    @classmethod
    def parse(cls, text: str) -> "Identifier":
        ns, sep, rest = text.partition(":")
        if not sep or not rest:
            raise SchemaError(f"malformed identifier: {text!r}")
        try:
            namespace = Namespace(ns)
        except ValueError:
            raise SchemaError(f"unknown identifier namespace: {ns!r}") from None
        return cls(namespace, rest)


def check_identifier(etype: EntityType, identifier: Identifier) -> None:
    if identifier.namespace not in NAMESPACES_FOR_TYPE[etype]:
        raise SchemaError(
            f"namespace {identifier.namespace.value} not allowed for {etype.value}"
        )


@dataclass(frozen=True)
class EntityAnnotation:
    """One entity mention, located in whole-document character coordinates."""

    start: int
    length: int
    text: str
    etype: EntityType
    identifier: Identifier
    semantic_key: str

    @property
    def end(self) -> int:
        return self.start + self.length

    def validate(self) -> None:
        if self.length <= 0 or self.start < 0:
            raise OffsetError(f"bad span ({self.start}, {self.length})")
        if len(self.text) != self.length:
            raise OffsetError(
                f"span length {self.length} != text length {len(self.text)}"
            )
        if not is_semantic_key(self.semantic_key):
            raise SchemaError(f"malformed semantic key: {self.semantic_key!r}")
        if key_entity_type(self.semantic_key) is not self.etype:
            raise SchemaError(
                f"semantic key {self.semantic_key} does not match type {self.etype.value}"
            )
        check_identifier(self.etype, self.identifier)


@dataclass(frozen=True)
class Passage:
    """A titled block of article text with its global character offset."""

    section_kind: SectionKind
    text: str
    offset: int
    annotations: tuple[EntityAnnotation, ...] = ()

    @property
    def end(self) -> int:
        return self.offset + len(self.text)

    def validate(self) -> None:
        for ann in self.annotations:
            ann.validate()
            if ann.start < self.offset or ann.end > self.end:
                raise OffsetError(
                    f"annotation {ann.semantic_key} at {ann.start} outside passage"
                    f" [{self.offset}, {self.end})"
                )
            got = self.text[ann.start - self.offset : ann.end - self.offset]
            if got != ann.text:
                raise OffsetError(
                    f"annotation text {ann.text!r} != document text {got!r}"
                    f" at offset {ann.start}"
                )


@dataclass(frozen=True)
class Document:
    """One article: metadata plus ordered, non-overlapping passages."""

    pmid: int
    title: str
    journal: str = ""
    pub_year: int = 0
    pub_types: frozenset[str] = frozenset()
    pmcid: str | None = None
    passages: tuple[Passage, ...] = ()

    def validate(self) -> None:
        if self.pmid <= 0:
            raise SchemaError(f"pmid must be positive, got {self.pmid}")
        if not self.passages:
            raise SchemaError(f"document {self.pmid} has no passages")
        first = self.passages[0]
        if first.section_kind is not SectionKind.TITLE:
            raise SchemaError(f"document {self.pmid}: first passage must be the title")
        if first.offset != 0:
            raise SchemaError(f"document {self.pmid}: first passage offset must be 0")
        if not self.title:
            raise SchemaError(f"document {self.pmid} has no title")
        prev_end = -1
        for p in self.passages:
            if p.offset <= prev_end and prev_end >= 0:
                raise SchemaError(
                    f"document {self.pmid}: passages overlap or are unsorted"
                )
            prev_end = p.end
            p.validate()

    @property
    def abstract(self) -> str:
        for p in self.passages:
            if p.section_kind is SectionKind.ABSTRACT:
                return p.text
        return ""

    def all_annotations(self) -> list[EntityAnnotation]:
        out: list[EntityAnnotation] = []
        for p in self.passages:
            out.extend(p.annotations)
        return out

    def text_at(self, start: int, length: int) -> str:
        """Slice whole-document text; spans must fall inside one passage."""
        for p in self.passages:
            if p.offset <= start and start + length <= p.end:
                return p.text[start - p.offset : start - p.offset + length]
        raise OffsetError(f"span ({start}, {length}) not inside any passage")

    def full_text(self) -> str:
        """Document text with every passage placed at its global offset.

        Offset gaps between passages are filled with spaces so that global
        spans slice correctly.
        """
        if not self.passages:
            return ""
        buf = []
        pos = 0
        for p in self.passages:
            if p.offset > pos:
                buf.append(" " * (p.offset - pos))
            buf.append(p.text)
            pos = p.end
        return "".join(buf)


@dataclass(frozen=True)
class Relation:
    """A typed, schema-valid entity pair with passage-level evidence."""

    pmid: int
    rtype: RelationType
    e1: str
    e2: str
    evidence: tuple[int, ...] = ()

    def validate(self) -> None:
        if self.e1 == self.e2:
            raise SchemaError(f"relation endpoints are identical: {self.e1}")
        t1 = key_entity_type(self.e1)
        t2 = key_entity_type(self.e2)
        if not validate_relation_schema(self.rtype, t1, t2):
            raise SchemaError(
                f"{self.rtype.value} not allowed for {t1.value}/{t2.value}"
            )
        if (self.e1, self.e2) != canonical_pair(self.e1, self.e2):
            raise SchemaError(
                f"relation endpoints not in canonical order: {self.e1}, {self.e2}"
            )

    @classmethod
    def make(
        cls,
        pmid: int,
        rtype: RelationType,
        a: str,
        b: str,
        evidence: tuple[int, ...] = (),
    ) -> "Relation":
        """Build a relation with endpoints in canonical order."""
        e1, e2 = canonical_pair(a, b)
        rel = cls(pmid, rtype, e1, e2, evidence)
        rel.validate()
        return rel

    def triple(self) -> tuple[RelationType, str, str]:
        return (self.rtype, self.e1, self.e2)


def _pairs(*pairs: tuple[EntityType, EntityType]) -> frozenset[frozenset[EntityType]]:
    return frozenset(frozenset(p) for p in pairs)


_C = EntityType.CHEMICAL
_D = EntityType.DISEASE
_G = EntityType.GENE
_V = EntityType.VARIANT

# Allowed entity-type pairs per relation type.  Pairs are unordered; only
# chemicals, diseases, genes and variants take part in relations.
RELATION_SCHEMA: dict[RelationType, frozenset[frozenset[EntityType]]] = {
    RelationType.ASSOCIATE: _pairs((_C, _D), (_C, _G), (_C, _V), (_D, _G), (_D, _V), (_V, _V)),
    RelationType.CAUSE: _pairs((_C, _D), (_V, _D)),
    RelationType.COMPARE: _pairs((_C, _C)),
    RelationType.COTREAT: _pairs((_C, _C)),
    RelationType.DRUG_INTERACT: _pairs((_C, _C)),
    RelationType.INHIBIT: _pairs((_C, _V), (_G, _D)),
    RelationType.INTERACT: _pairs((_C, _G), (_C, _V), (_G, _G)),
    RelationType.NEGATIVE_CORRELATE: _pairs((_C, _G), (_C, _V), (_G, _G)),
    RelationType.POSITIVE_CORRELATE: _pairs((_C, _C), (_C, _G), (_G, _G)),
    RelationType.PREVENT: _pairs((_V, _D)),
    RelationType.STIMULATE: _pairs((_C, _V), (_G, _D)),
    RelationType.TREAT: _pairs((_C, _D)),
}


def validate_relation_schema(
    rtype: RelationType, etype1: EntityType, etype2: EntityType
) -> bool:
    """True iff the unordered entity-type pair is allowed for ``rtype``."""
    return frozenset((etype1, etype2)) in RELATION_SCHEMA[rtype]


def schema_combinations() -> list[tuple[RelationType, frozenset[EntityType]]]:
    """Flat list of every valid (relation type, type pair) combination."""
    out = []
    for rtype in RelationType:
        for pair in sorted(RELATION_SCHEMA[rtype], key=lambda p: sorted(t.value for t in p)):
            out.append((rtype, pair))
    return out
