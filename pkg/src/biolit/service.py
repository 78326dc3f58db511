"""HTTP API over one shared snapshot.

Endpoints (all JSON unless noted; field names snake_case, documented in
docs/api.md):

* ``GET  /search``               — ranked search with facets + histogram
* ``GET  /relations``            — relation-store lookup
* ``GET  /entity/autocomplete``  — semantic term suggestions
* ``GET  /publications/export``  — BioC JSON/XML or tab-delimited export
* ``POST /annotate``             — annotate user-supplied free text

Every endpoint is a pure function of (snapshot, request).  The serving
process watches the snapshot file and swaps in replacements atomically
between requests.  Every 4xx body carries a machine-readable ``code``
from a closed enum.
"""

from __future__ import annotations

import os
import threading
from dataclasses import dataclass, field

from fastapi import FastAPI, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, PlainTextResponse

from . import index as index_mod
from .annotator import TriggerRule, extract_relations, tag_entities
from .bioc import BiocFormat, serialize_bioc
from .docmodel import Document, Passage, RelationType, SectionKind
from .errors import (
    BadKey,
    BadPage,
    BiolitError,
    EmptyQuery,
    QueryParseError,
)
from .index import IndexSnapshot, lookup_relations
from .lexicon import Lexicon
from .pubtator import corpus_to_pubtator_tsv
from .querylang import parse_query, suggest
from .ranker import Filters, execute

MAX_ANNOTATE_BYTES = 100 * 1024
MAX_EXPORT_IDS = 100
RELATION_PMID_CAP = 20
FREE_TEXT_PMID = 1

ERROR_CODES = frozenset(
    {
        "PARSE_ERROR",
        "EMPTY_QUERY",
        "BAD_PAGE",
        "BAD_KEY",
        "UNKNOWN_RELATION_TYPE",
        "BAD_LIMIT",
        "TOO_MANY_IDS",
        "BAD_FORMAT",
        "TOO_LARGE",
        "EMPTY_BODY",
        "SNAPSHOT_LOADING",
    }
)


@dataclass
class ApiConfig:
    listen_host: str = "127.0.0.1"
    listen_port: int = 8650
    snapshot_path: str | None = None
    page_size_default: int = 10
    page_size_cap: int = 100
    cors_allowlist: tuple[str, ...] = ()
    lexicon_path: str | None = None
    rules_path: str | None = None
    llm_endpoint: str | None = None
    llm_model: str | None = None
    llm_api_key: str | None = None

    def __post_init__(self):
        if self.page_size_cap > 100:
            raise ValueError("page-size cap must be <= 100")


def load_config(path: str | None = None, env: dict | None = None) -> ApiConfig:
    """Key=value config file plus environment overrides."""
    env = os.environ if env is None else env
    values: dict[str, str] = {}
    if path:
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                key, sep, value = line.partition("=")
                if not sep:
                    raise ValueError(f"config line is not key=value: {line!r}")
                values[key.strip()] = value.strip().strip('"')
    cfg = ApiConfig(
        listen_host=values.get("listen_host", "127.0.0.1"),
        listen_port=int(values.get("listen_port", "8650")),
        snapshot_path=values.get("snapshot_path"),
        page_size_default=int(values.get("page_size_default", "10")),
        page_size_cap=int(values.get("page_size_cap", "100")),
        cors_allowlist=tuple(
            v for v in values.get("cors_allowlist", "").split(",") if v
        ),
        lexicon_path=values.get("lexicon_path"),
        rules_path=values.get("rules_path"),
        llm_endpoint=values.get("llm_endpoint"),
        llm_model=values.get("llm_model"),
        llm_api_key=values.get("llm_api_key"),
    )
    listen = env.get("BIOLIT_LISTEN")
    if listen:
        host, _, port = listen.partition(":")
        cfg.listen_host = host or cfg.listen_host
        if port:
            cfg.listen_port = int(port)
    cfg.llm_endpoint = env.get("BIOLIT_LLM_ENDPOINT", cfg.llm_endpoint)
    cfg.llm_model = env.get("BIOLIT_LLM_MODEL", cfg.llm_model)
    cfg.llm_api_key = env.get("BIOLIT_LLM_API_KEY", cfg.llm_api_key)
    return cfg


class SnapshotProvider:
    """Shares one immutable snapshot; hot-swaps when the file changes."""

    def __init__(self, path: str | None = None, snapshot: IndexSnapshot | None = None):
        self._path = path
        self._snapshot = snapshot
        self._mtime: float | None = None
        self._lock = threading.Lock()
        if path and snapshot is None:
            self.reload()

    def reload(self) -> None:
        if not self._path:
            return
        mtime = os.stat(self._path).st_mtime
        snapshot = index_mod.load(self._path)
        with self._lock:
            self._snapshot = snapshot
            self._mtime = mtime

    def get(self) -> IndexSnapshot | None:
        if self._path:
            try:
                mtime = os.stat(self._path).st_mtime
            except OSError:
                mtime = self._mtime
            if mtime != self._mtime:
                try:
                    self.reload()
                except BiolitError:
                    pass  # keep serving the previous snapshot
        with self._lock:
            return self._snapshot

    def set(self, snapshot: IndexSnapshot) -> None:
        with self._lock:
            self._snapshot = snapshot


@dataclass
class _ApiError(Exception):
    status: int
    code: str
    message: str
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        assert self.code in ERROR_CODES


def _hit_payload(snapshot: IndexSnapshot, hit) -> dict:
    meta = snapshot.docs[hit.pmid]
    return {
        "pmid": hit.pmid,
        "tier": hit.tier,
        "score": hit.score,
        "title": meta.title,
        "journal": meta.journal,
        "year": meta.pub_year,
        "matched_section": hit.matched_section,
        "snippet": hit.snippet.text,
        "highlights": [list(h) for h in hit.snippet.highlights],
    }


def create_app(
    provider: SnapshotProvider,
    config: ApiConfig | None = None,
    lexicon: Lexicon | None = None,
    rules: list[TriggerRule] | None = None,
) -> FastAPI:
    config = config or ApiConfig()
    if lexicon is None or rules is None:
        from . import fixtures

        lexicon = lexicon or (
            fixtures.fixture_lexicon()
            if config.lexicon_path is None
            else _load_lexicon(config.lexicon_path)
        )
        rules = rules or (
            fixtures.fixture_rules()
            if config.rules_path is None
            else _load_rules(config.rules_path)
        )
    app = FastAPI(title="biolit", docs_url=None, redoc_url=None)
    if config.cors_allowlist:
        app.add_middleware(
            CORSMiddleware,
            allow_origins=list(config.cors_allowlist),
            allow_methods=["GET", "POST"],
            allow_headers=["*"],
        )

    @app.exception_handler(_ApiError)
    async def on_api_error(_request: Request, exc: _ApiError):
        body = {"error": {"code": exc.code, "message": exc.message, **exc.extra}}
        return JSONResponse(status_code=exc.status, content=body)

    def need_snapshot() -> IndexSnapshot:
        snapshot = provider.get()
        if snapshot is None:
            raise _ApiError(503, "SNAPSHOT_LOADING", "snapshot not loaded yet")
        return snapshot

    @app.get("/search")
    def search(
        text: str = "",
        page: int = 0,
        page_size: int | None = None,
        filter_journal: str | None = None,
        filter_section: str | None = None,
        filter_type: str | None = None,
        filter_year: int | None = None,
    ):
        snapshot = need_snapshot()
        size = config.page_size_default if page_size is None else page_size
        if page < 0 or size < 1 or size > config.page_size_cap:
            raise _ApiError(400, "BAD_PAGE", f"page {page}, page_size {size} out of range")
        try:
            ast = parse_query(text)
        except EmptyQuery as exc:
            raise _ApiError(400, "EMPTY_QUERY", str(exc), {"position": exc.position})
        except QueryParseError as exc:
            raise _ApiError(400, "PARSE_ERROR", str(exc), {"position": exc.position})
        filters = Filters(
            journal=filter_journal,
            section=filter_section,
            pub_type=filter_type,
            year=filter_year,
        )
        try:
            result = execute(ast, snapshot, filters, page=(page * size, size))
        except BadPage as exc:
            raise _ApiError(400, "BAD_PAGE", str(exc))
        return {
            "total": result.total,
            "page": page,
            "page_size": size,
            "hits": [_hit_payload(snapshot, h) for h in result.hits],
            "facets": result.facets,
            "histogram": {str(year): count for year, count in result.histogram.items()},
            "diagnostics": list(result.diagnostics),
        }

    @app.get("/relations")
    def relations(e1: str | None = None, type: str | None = None, e2: str | None = None):
        snapshot = need_snapshot()
        rtype = None
        if type:
            try:
                rtype = RelationType(type.upper())
            except ValueError:
                raise _ApiError(
                    400, "UNKNOWN_RELATION_TYPE", f"unknown relation type {type!r}"
                ) from None
        try:
            hits = lookup_relations(snapshot, e1, rtype, e2)
        except BadKey as exc:
            raise _ApiError(400, "BAD_KEY", str(exc))
        return [
            {
                "rtype": h.rtype.value.lower(),
                "e1": h.e1,
                "e2": h.e2,
                "pmid_count": len(h.pmids),
                "pmids": list(h.pmids[:RELATION_PMID_CAP]),
            }
            for h in hits
        ]

    @app.get("/entity/autocomplete")
    def autocomplete(query: str = "", limit: int = 10):
        snapshot = need_snapshot()
        if limit < 1 or limit > 50:
            raise _ApiError(400, "BAD_LIMIT", f"limit must be 1..50, got {limit}")
        return [
            {
                "name": s.name,
                "semantic_key": s.semantic_key,
                "etype": s.etype,
                "doc_freq": s.doc_freq,
                "matched_synonym": s.matched_synonym,
            }
            for s in suggest(query, snapshot, limit)
        ]

    @app.get("/publications/export")
    def export(pmids: str = "", format: str = "biocjson"):
        snapshot = need_snapshot()
        if format not in ("biocjson", "biocxml", "pubtator"):
            raise _ApiError(400, "BAD_FORMAT", f"unknown format {format!r}")
        try:
            requested = [int(p) for p in pmids.split(",") if p.strip()]
        except ValueError:
            raise _ApiError(400, "BAD_FORMAT", "pmids must be integers") from None
        if len(requested) > MAX_EXPORT_IDS:
            raise _ApiError(
                400, "TOO_MANY_IDS", f"at most {MAX_EXPORT_IDS} pmids per call"
            )
        known = [p for p in requested if p in snapshot.docs]
        unknown = [p for p in requested if p not in snapshot.docs]
        docs = [index_mod.reconstruct_document(snapshot, p) for p in known]
        relations_by_pmid = {p: index_mod.reconstruct_relations(snapshot, p) for p in known}
        headers = {}
        if unknown:
            headers["x-biolit-unknown-pmids"] = ",".join(str(p) for p in unknown)
        if format == "pubtator":
            body = corpus_to_pubtator_tsv(
                docs, relations_by_pmid, lowercase_relations=True
            )
            return PlainTextResponse(body, headers=headers)
        fmt = BiocFormat.JSON if format == "biocjson" else BiocFormat.XML
        body = serialize_bioc(docs, fmt, relations_by_pmid)
        media = "application/json" if format == "biocjson" else "application/xml"
        return Response(content=body, media_type=media, headers=headers)

    @app.post("/annotate")
    async def annotate(request: Request):
        snapshot = provider.get()  # annotation works without a snapshot
        del snapshot
        body = await request.body()
        if len(body) > MAX_ANNOTATE_BYTES:
            raise _ApiError(413, "TOO_LARGE", f"body exceeds {MAX_ANNOTATE_BYTES} bytes")
        text = body.decode("utf-8", errors="replace").strip()
        if not text:
            raise _ApiError(400, "EMPTY_BODY", "no text to annotate")
        doc = Document(
            pmid=FREE_TEXT_PMID,
            title=text,
            passages=(Passage(SectionKind.TITLE, text, 0),),
        )
        tagged = tag_entities(doc, lexicon)
        found = extract_relations(tagged, rules)
        payload = serialize_bioc([tagged], BiocFormat.JSON, {FREE_TEXT_PMID: found})
        return Response(content=payload, media_type="application/json")

    return app


def _load_lexicon(path: str) -> Lexicon:
    from .lexicon import load_lexicon

    return load_lexicon(path)


def _load_rules(path: str) -> list[TriggerRule]:
    from .annotator import load_rules

    return load_rules(path)
