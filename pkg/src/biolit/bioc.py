"""BioC XML and BioC JSON readers/writers.

Both formats carry the same collection → document → passage → annotation
hierarchy, with ``infons`` key-value maps holding entity type and
identifier.  Parsing and serialization are exact inverses over valid
documents; serializing twice through a parse is byte-identical.
"""

from __future__ import annotations

import io
import json
import xml.etree.ElementTree as ET
from enum import Enum

from .docmodel import (
    Document,
    EntityAnnotation,
    Identifier,
    Passage,
    Relation,
    RelationType,
    SectionKind,
    key_entity_type,
)
from .errors import MarkupError, SchemaError

SOURCE_NAME = "biolit"

_SECTION_BY_NAME = {kind.value.lower(): kind for kind in SectionKind}


class BiocFormat(str, Enum):
    XML = "XML"
    JSON = "JSON"


def _section_from_infon(value: str) -> SectionKind:
    return _SECTION_BY_NAME.get(value.strip().lower(), SectionKind.OTHER)


def _doc_infons(doc: Document) -> dict[str, str]:
    infons = {}
    if doc.journal:
        infons["journal"] = doc.journal
    if doc.pub_year:
        infons["year"] = str(doc.pub_year)
    if doc.pub_types:
        infons["pub_types"] = "|".join(sorted(doc.pub_types))
    if doc.pmcid:
        infons["pmcid"] = doc.pmcid
    return infons


def _annotation_to_dict(ann: EntityAnnotation, aid: int) -> dict:
    return {
        "id": str(aid),
        "infons": {
            "type": ann.etype.value,
            "identifier": str(ann.identifier),
            "semantic_key": ann.semantic_key,
        },
        "text": ann.text,
        "locations": [{"offset": ann.start, "length": ann.length}],
    }


def _relation_to_dict(rel: Relation, rid: int) -> dict:
    return {
        "id": f"r{rid}",
        "infons": {
            "type": rel.rtype.value,
            "entity1": rel.e1,
            "entity2": rel.e2,
            "evidence_passages": ",".join(str(i) for i in rel.evidence),
        },
    }


def _doc_to_dict(doc: Document, relations: list[Relation] | None) -> dict:
    aid = 0
    passages = []
    for p in doc.passages:
        anns = []
        for ann in p.annotations:
            aid += 1
            anns.append(_annotation_to_dict(ann, aid))
        passages.append(
            {
                "infons": {"section_type": p.section_kind.value.lower()},
                "offset": p.offset,
                "text": p.text,
                "annotations": anns,
            }
        )
    out = {"id": str(doc.pmid), "infons": _doc_infons(doc), "passages": passages}
    if relations:
        out["relations"] = [_relation_to_dict(r, i + 1) for i, r in enumerate(relations)]
    return out


def _annotation_from_dict(raw: dict) -> EntityAnnotation:
    try:
        infons = raw.get("infons", {})
        etype_name = infons["type"]
        identifier = Identifier.parse(infons["identifier"])
        locations = raw["locations"]
        text = raw.get("text", "")
    except (KeyError, TypeError) as exc:
        raise MarkupError(f"annotation record incomplete: {exc}") from None
    if len(locations) != 1:
        raise MarkupError("annotation must carry exactly one location")
    loc = locations[0]
    from .docmodel import EntityType, make_semantic_key

    try:
        etype = EntityType(etype_name)
    except ValueError:
        raise SchemaError(f"unknown entity type: {etype_name!r}") from None
    key = infons.get("semantic_key") or make_semantic_key(etype, text)
    return EntityAnnotation(
        start=int(loc["offset"]),
        length=int(loc["length"]),
        text=text,
        etype=etype,
        identifier=identifier,
        semantic_key=key,
    )


def _relation_from_dict(raw: dict, pmid: int) -> Relation:
    infons = raw.get("infons", {})
    try:
        rtype = RelationType(infons["type"])
        e1 = infons["entity1"]
        e2 = infons["entity2"]
    except (KeyError, ValueError) as exc:
        raise MarkupError(f"relation record incomplete: {exc}") from None
    evidence = tuple(
        int(x) for x in infons.get("evidence_passages", "").split(",") if x
    )
    key_entity_type(e1), key_entity_type(e2)  # malformed keys raise here
    return Relation(pmid, rtype, e1, e2, evidence)


def _doc_from_dict(raw: dict) -> tuple[Document, list[Relation]]:
    try:
        pmid = int(raw["id"])
    except (KeyError, ValueError, TypeError):
        raise SchemaError("document lacks a numeric pmid") from None
    infons = raw.get("infons", {})
    passages = []
    title = ""
    for praw in raw.get("passages", []):
        kind = _section_from_infon(praw.get("infons", {}).get("section_type", "other"))
        text = praw.get("text", "")
        anns = tuple(_annotation_from_dict(a) for a in praw.get("annotations", []))
        passage = Passage(kind, text, int(praw.get("offset", 0)), anns)
        if kind is SectionKind.TITLE and not title:
            title = text
        passages.append(passage)
    pub_types = frozenset(
        t for t in infons.get("pub_types", "").split("|") if t
    )
    doc = Document(
        pmid=pmid,
        title=title,
        journal=infons.get("journal", ""),
        pub_year=int(infons.get("year", 0) or 0),
        pub_types=pub_types,
        pmcid=infons.get("pmcid"),
        passages=tuple(passages),
    )
    doc.validate()
    relations = [_relation_from_dict(r, pmid) for r in raw.get("relations", [])]
    return doc, relations


# --- JSON ----------------------------------------------------------------


def _collection_to_json(docs, relations_by_pmid) -> str:
    collection = {
        "source": SOURCE_NAME,
        "key": "",
        "documents": [
            _doc_to_dict(d, (relations_by_pmid or {}).get(d.pmid)) for d in docs
        ],
    }
    return json.dumps(collection, indent=2, ensure_ascii=False) + "\n"


def _collection_from_json(text: str):
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MarkupError(f"invalid JSON: {exc}") from None
    if not isinstance(raw, dict) or "documents" not in raw:
        raise MarkupError("JSON input is not a BioC collection")
    return [_doc_from_dict(d) for d in raw["documents"]]


# --- XML -----------------------------------------------------------------


def _infon_elements(parent: ET.Element, infons: dict[str, str]) -> None:
    for key, value in infons.items():
        el = ET.SubElement(parent, "infon", {"key": key})
        el.text = value


def _read_infons(el: ET.Element) -> dict[str, str]:
    return {i.get("key", ""): (i.text or "") for i in el.findall("infon")}


def _collection_to_xml(docs, relations_by_pmid) -> str:
    root = ET.Element("collection")
    ET.SubElement(root, "source").text = SOURCE_NAME
    ET.SubElement(root, "key").text = ""
    for doc in docs:
        raw = _doc_to_dict(doc, (relations_by_pmid or {}).get(doc.pmid))
        del_ = ET.SubElement(root, "document")
        ET.SubElement(del_, "id").text = raw["id"]
        _infon_elements(del_, raw["infons"])
        for praw in raw["passages"]:
            pel = ET.SubElement(del_, "passage")
            _infon_elements(pel, praw["infons"])
            ET.SubElement(pel, "offset").text = str(praw["offset"])
            ET.SubElement(pel, "text").text = praw["text"]
            for araw in praw["annotations"]:
                ael = ET.SubElement(pel, "annotation", {"id": araw["id"]})
                _infon_elements(ael, araw["infons"])
                loc = araw["locations"][0]
                ET.SubElement(
                    ael,
                    "location",
                    {"offset": str(loc["offset"]), "length": str(loc["length"])},
                )
                ET.SubElement(ael, "text").text = araw["text"]
        for rraw in raw.get("relations", []):
            rel = ET.SubElement(del_, "relation", {"id": rraw["id"]})
            _infon_elements(rel, rraw["infons"])
    ET.indent(root)
    buf = io.StringIO()
    ET.ElementTree(root).write(buf, encoding="unicode", xml_declaration=True)
    return buf.getvalue() + "\n"


def _xml_annotation_dict(ael: ET.Element) -> dict:
    infons = _read_infons(ael)
    loc = ael.find("location")
    if loc is None:
        raise MarkupError("annotation without location")
    text_el = ael.find("text")
    return {
        "id": ael.get("id", ""),
        "infons": infons,
        "text": (text_el.text or "") if text_el is not None else "",
        "locations": [
            {"offset": int(loc.get("offset", "0")), "length": int(loc.get("length", "0"))}
        ],
    }


def _collection_from_xml(text: str):
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        raise MarkupError(f"invalid XML: {exc}") from None
    if root.tag != "collection":
        raise MarkupError(f"expected <collection> root, got <{root.tag}>")
    results = []
    for del_ in root.findall("document"):
        id_el = del_.find("id")
        raw = {
            "id": id_el.text if id_el is not None else None,
            "infons": _read_infons(del_),
            "passages": [],
            "relations": [],
        }
        for pel in del_.findall("passage"):
            offset_el = pel.find("offset")
            text_el = pel.find("text")
            raw["passages"].append(
                {
                    "infons": _read_infons(pel),
                    "offset": int(offset_el.text or 0) if offset_el is not None else 0,
                    "text": (text_el.text or "") if text_el is not None else "",
                    "annotations": [
                        _xml_annotation_dict(a) for a in pel.findall("annotation")
                    ],
                }
            )
        for rel in del_.findall("relation"):
            raw["relations"].append({"id": rel.get("id", ""), "infons": _read_infons(rel)})
        results.append(_doc_from_dict(raw))
    return results


# --- public API -----------------------------------------------------------


def parse_bioc(text: str, fmt: BiocFormat) -> list[Document]:
    """Parse a BioC collection; returns validated documents."""
    return [doc for doc, _ in parse_bioc_collection(text, fmt)]


def parse_bioc_collection(
    text: str, fmt: BiocFormat
) -> list[tuple[Document, list[Relation]]]:
    """Parse a BioC collection keeping any document-level relations."""
    if fmt is BiocFormat.JSON:
        return _collection_from_json(text)
    return _collection_from_xml(text)


def serialize_bioc(
    docs: list[Document],
    fmt: BiocFormat,
    relations_by_pmid: dict[int, list[Relation]] | None = None,
) -> str:
    """Serialize documents (optionally with relations) to BioC text."""
    for d in docs:
        d.validate()
    if fmt is BiocFormat.JSON:
        return _collection_to_json(docs, relations_by_pmid)
    return _collection_to_xml(docs, relations_by_pmid)
