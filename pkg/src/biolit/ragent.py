"""Retrieval-augmented generation over the snapshot, with citation checks.

Three tools are exposed to a chat-completion model: ``find_entity_id``
(text to semantic keys), ``find_related_entities`` (related entities via
the relation store, capped at five), and ``export_relevant_search_results``
(PMIDs evidencing one relation, newest first, capped at twenty).  The
orchestrator loops question → tool calls → synthesis at temperature zero,
then every cited PMID is verified against the snapshot: it must exist,
and the claimed relation must be in the relation store for that article
(or, as a fallback, both entities must share a sentence there).

The final model message must start with ``Summary:`` and carry a trailing
``Claims-JSON:`` line with machine-readable claims; answers that cite
PMIDs never returned by a tool are marked degraded and the offending
PMIDs reported.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .docmodel import (
    EntityType,
    RelationType,
    canonical_pair,
    is_semantic_key,
    key_entity_type,
    validate_relation_schema,
)
from .errors import (
    BadKey,
    BudgetExhausted,
    ClaimParseError,
    LlmTransportError,
    ProtocolError,
    SchemaError,
)
from .index import IndexSnapshot
from .querylang import resolve_free_term, suggest

FIND_ENTITY_CAP = 5
RELATED_CAP = 5
EXPORT_CAP = 20

CLAIMS_MARKER = "Claims-JSON:"

SYSTEM_PROMPT = (
    "You answer biomedical questions using three tools: find_entity_id, "
    "find_related_entities, and export_relevant_search_results. Decompose "
    "the question into sub-questions these tools can answer, execute the "
    "calls, then synthesize a final answer. Start the final message with "
    '"Summary:", cite only PMIDs returned by the tools, and finish with a '
    'line "Claims-JSON: {\\"claims\\": [...]}" listing each claim as '
    '{"subject", "type", "object", "pmids"}.'
)

TOOL_SCHEMAS = [
    {
        "name": "find_entity_id",
        "description": "Look up semantic entity identifiers for free text.",
        "parameters": {
            "type": "object",
            "properties": {"text": {"type": "string"}},
            "required": ["text"],
        },
    },
    {
        "name": "find_related_entities",
        "description": (
            "Entities related to the given entity, optionally restricted "
            "to one relation type and one target entity type."
        ),
        "parameters": {
            "type": "object",
            "properties": {
                "entity": {"type": "string"},
                "type": {"type": "string"},
                "target_type": {"type": "string"},
            },
            "required": ["entity"],
        },
    },
    {
        "name": "export_relevant_search_results",
        "description": "PMIDs with textual evidence for one entity relation.",
        "parameters": {
            "type": "object",
            "properties": {
                "e1": {"type": "string"},
                "type": {"type": "string"},
                "e2": {"type": "string"},
            },
            "required": ["e1", "type", "e2"],
        },
    },
]


# --- tools -------------------------------------------------------------------


def tool_find_entity_id(text: str, snapshot: IndexSnapshot) -> list[str]:
    """Ranked semantic keys for free text: exact resolution first."""
    if not text or not text.strip():
        return []
    keys: list[str] = []
    exact = resolve_free_term(text, snapshot)
    if exact:
        keys.append(exact)
    for s in suggest(text, snapshot, FIND_ENTITY_CAP):
        if s.semantic_key not in keys:
            keys.append(s.semantic_key)
    return keys[:FIND_ENTITY_CAP]


def _parse_rtype(token: str | None) -> RelationType | None:
    if token is None or token == "":
        return None
    try:
        return RelationType(token.upper())
    except ValueError:
        raise BadKey(f"unknown relation type {token!r}") from None


def _parse_etype(token: str | None) -> EntityType | None:
    if token is None or token == "":
        return None
    try:
        return EntityType(token.capitalize() if token.islower() else token)
    except ValueError:
        raise BadKey(f"unknown entity type {token!r}") from None


def tool_find_related_entities(
    entity: str,
    snapshot: IndexSnapshot,
    rtype: str | RelationType | None = None,
    target_type: str | EntityType | None = None,
) -> list[dict]:
    """Related entities by relation-store co-membership, top five."""
    if not is_semantic_key(entity):
        raise BadKey(f"malformed semantic key: {entity!r}")
    want_rtype = rtype if isinstance(rtype, RelationType) else _parse_rtype(rtype)
    want_etype = (
        target_type if isinstance(target_type, EntityType) else _parse_etype(target_type)
    )
    rows = []
    for (rt, a, b), occ in snapshot.relation_store.items():
        if want_rtype is not None and rt != want_rtype.value:
            continue
        if entity == a:
            other = b
        elif entity == b:
            other = a
        else:
            continue
        if want_etype is not None and key_entity_type(other) is not want_etype:
            continue
        pmids = sorted({pmid for pmid, _ in occ})
        rows.append({"entity": other, "type": rt.lower(), "pmid_count": len(pmids)})
    rows.sort(key=lambda r: (-r["pmid_count"], r["entity"], r["type"]))
    return rows[:RELATED_CAP]


def tool_export_relevant_search_results(
    e1: str,
    rtype: str | RelationType,
    e2: str,
    snapshot: IndexSnapshot,
) -> list[int]:
    """PMIDs holding the given relation, newest first, top twenty."""
    for key in (e1, e2):
        if not is_semantic_key(key):
            raise SchemaError(f"malformed semantic key: {key!r}")
    want = rtype if isinstance(rtype, RelationType) else RelationType(str(rtype).upper())
    t1, t2 = key_entity_type(e1), key_entity_type(e2)
    if not validate_relation_schema(want, t1, t2):
        raise SchemaError(f"{want.value} not allowed for {t1.value}/{t2.value}")
    pmids = snapshot.relation_pmids(want, e1, e2)
    pmids.sort(key=lambda p: (-snapshot.year_index.get(p, 0), -p))
    return pmids[:EXPORT_CAP]


def run_tool(name: str, arguments: dict, snapshot: IndexSnapshot):
    if name == "find_entity_id":
        return tool_find_entity_id(arguments.get("text", ""), snapshot)
    if name == "find_related_entities":
        return tool_find_related_entities(
            arguments.get("entity", ""),
            snapshot,
            rtype=arguments.get("type"),
            target_type=arguments.get("target_type"),
        )
    if name == "export_relevant_search_results":
        return tool_export_relevant_search_results(
            arguments.get("e1", ""),
            arguments.get("type", ""),
            arguments.get("e2", ""),
            snapshot,
        )
    raise ProtocolError(f"unknown tool {name!r}")


# --- answers ------------------------------------------------------------------


@dataclass(frozen=True)
class ToolCall:
    name: str
    arguments: dict
    result: object


@dataclass(frozen=True)
class Claim:
    subject: str
    rtype: str
    object: str
    pmids: tuple[int, ...]


@dataclass(frozen=True)
class AgentAnswer:
    summary: str
    claims: tuple[Claim, ...]
    transcript: tuple[ToolCall, ...]
    degraded: bool = False
    problems: tuple[str, ...] = ()
    fabricated_pmids: tuple[int, ...] = ()

    def cited_pmids(self) -> list[int]:
        out: list[int] = []
        for claim in self.claims:
            for pmid in claim.pmids:
                if pmid not in out:
                    out.append(pmid)
        return out


def parse_claims(text: str) -> tuple[Claim, ...]:
    """Extract the machine-readable claims block from an answer."""
    marker = text.rfind(CLAIMS_MARKER)
    if marker < 0:
        raise ClaimParseError("answer lacks a Claims-JSON block")
    raw = text[marker + len(CLAIMS_MARKER) :].strip()
    try:
        payload = json.loads(raw)
        claims = [
            Claim(
                subject=c["subject"],
                rtype=str(c["type"]).upper(),
                object=c["object"],
                pmids=tuple(int(p) for p in c["pmids"]),
            )
            for c in payload["claims"]
        ]
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise ClaimParseError(f"malformed claims block: {exc}") from None
    return tuple(claims)


def _pmids_in(value) -> set[int]:
    if isinstance(value, bool):
        return set()
    if isinstance(value, int):
        return {value}
    if isinstance(value, list):
        out: set[int] = set()
        for v in value:
            out |= _pmids_in(v)
        return out
    if isinstance(value, dict):
        out = set()
        for v in value.values():
            out |= _pmids_in(v)
        return out
    return set()


def _finalize_answer(content: str, transcript: list[ToolCall]) -> AgentAnswer:
    problems: list[str] = []
    summary = content
    if not content.startswith("Summary:"):
        problems.append('final message does not start with "Summary:"')
    try:
        claims = parse_claims(content)
    except ClaimParseError as exc:
        problems.append(str(exc))
        claims = ()
    tool_pmids: set[int] = set()
    for call in transcript:
        tool_pmids |= _pmids_in(call.result)
    fabricated = sorted(
        {p for claim in claims for p in claim.pmids if p not in tool_pmids}
    )
    if fabricated:
        problems.append(
            "cited pmids missing from tool results: "
            + ", ".join(str(p) for p in fabricated)
        )
    return AgentAnswer(
        summary=summary,
        claims=claims,
        transcript=tuple(transcript),
        degraded=bool(problems),
        problems=tuple(problems),
        fabricated_pmids=tuple(fabricated),
    )


def orchestrate(
    question: str,
    llm,
    snapshot: IndexSnapshot,
    budget: int = 8,
) -> AgentAnswer:
    """Question → tool-call loop → synthesized, checked answer.

    ``llm.complete(messages, tools, temperature)`` must return an
    assistant message dict with either ``tool_calls`` (name + arguments)
    or final ``content``.  Decoding temperature is requested as zero.
    """
    if budget < 3:
        raise ValueError("budget must allow at least the three-step flow")
    messages: list[dict] = [
        {"role": "system", "content": SYSTEM_PROMPT},
        {"role": "user", "content": question},
    ]
    transcript: list[ToolCall] = []
    calls_made = 0
    while True:
        reply = llm.complete(messages, TOOL_SCHEMAS, temperature=0.0)
        if not isinstance(reply, dict):
            raise ProtocolError("model reply is not a message object")
        tool_calls = reply.get("tool_calls") or []
        if tool_calls:
            if calls_made + len(tool_calls) > budget:
                raise BudgetExhausted(
                    f"tool budget {budget} exhausted", tuple(transcript)
                )
            messages.append(
                {"role": "assistant", "content": reply.get("content"), "tool_calls": tool_calls}
            )
            for tc in tool_calls:
                name = tc.get("name")
                arguments = tc.get("arguments")
                if not isinstance(name, str) or not isinstance(arguments, dict):
                    raise ProtocolError(f"malformed tool request: {tc!r}")
                result = run_tool(name, arguments, snapshot)
                transcript.append(ToolCall(name=name, arguments=arguments, result=result))
                messages.append(
                    {
                        "role": "tool",
                        "tool_call_id": tc.get("id", name),
                        "content": json.dumps(result),
                    }
                )
            calls_made += len(tool_calls)
            continue
        content = reply.get("content") or ""
        return _finalize_answer(content, transcript)


# --- citation verification ------------------------------------------------------


@dataclass(frozen=True)
class ClaimVerdict:
    claim: Claim
    supported: tuple[int, ...]
    unsupported: tuple[int, ...]
    nonexistent: tuple[int, ...]


@dataclass(frozen=True)
class CitationReport:
    verdicts: tuple[ClaimVerdict, ...] = ()
    supported: int = 0
    unsupported: int = 0
    nonexistent: int = 0

    @property
    def total(self) -> int:
        return self.supported + self.unsupported + self.nonexistent

    @property
    def precision(self) -> float:
        return self.supported / self.total if self.total else 0.0

    def as_fraction(self) -> str:
        return f"{self.supported} / {self.total}"


def _share_sentence(snapshot: IndexSnapshot, pmid: int, key_a: str, key_b: str) -> bool:
    places_a = {
        (p.passage_index, p.sentence_id)
        for p in snapshot.entity_postings.get(key_a, ())
        if p.pmid == pmid
    }
    return any(
        (p.passage_index, p.sentence_id) in places_a
        for p in snapshot.entity_postings.get(key_b, ())
        if p.pmid == pmid
    )


def verify_citations(answer: AgentAnswer, snapshot: IndexSnapshot) -> CitationReport:
    """Check every cited PMID against the snapshot, per claim."""
    verdicts = []
    supported = unsupported = nonexistent = 0
    for claim in answer.claims:
        if not (is_semantic_key(claim.subject) and is_semantic_key(claim.object)):
            raise ClaimParseError(
                f"claim endpoints are not semantic keys: {claim.subject!r}, {claim.object!r}"
            )
        try:
            rtype = RelationType(claim.rtype)
        except ValueError:
            raise ClaimParseError(f"unknown relation type {claim.rtype!r}") from None
        e1, e2 = canonical_pair(claim.subject, claim.object)
        with_relation = set(snapshot.relation_pmids(rtype, e1, e2))
        ok: list[int] = []
        bad: list[int] = []
        missing: list[int] = []
        for pmid in claim.pmids:
            if pmid not in snapshot.docs:
                missing.append(pmid)
            elif pmid in with_relation or _share_sentence(snapshot, pmid, e1, e2):
                ok.append(pmid)
            else:
                bad.append(pmid)
        supported += len(ok)
        unsupported += len(bad)
        nonexistent += len(missing)
        verdicts.append(
            ClaimVerdict(claim, tuple(ok), tuple(bad), tuple(missing))
        )
    return CitationReport(
        verdicts=tuple(verdicts),
        supported=supported,
        unsupported=unsupported,
        nonexistent=nonexistent,
    )


# --- real chat-completion client --------------------------------------------------


class HttpChatClient:
    """Minimal client for an OpenAI-style chat-completions endpoint with
    function calling.  Endpoint, model, and credentials come from the
    service configuration or environment."""

    def __init__(self, endpoint: str, model: str, api_key: str | None = None, timeout: float = 60.0, client=None):
        import httpx

        self.endpoint = endpoint.rstrip("/")
        self.model = model
        self.api_key = api_key
        self._client = client or httpx.Client(timeout=timeout)

    def complete(self, messages: list[dict], tools: list[dict], temperature: float = 0.0) -> dict:
        import httpx

        headers = {"content-type": "application/json"}
        if self.api_key:
            headers["authorization"] = f"Bearer {self.api_key}"
        payload = {
            "model": self.model,
            "messages": messages,
            "temperature": temperature,
            "tools": [{"type": "function", "function": schema} for schema in tools],
            "tool_choice": "auto",
        }
        try:
            response = self._client.post(
                f"{self.endpoint}/chat/completions", json=payload, headers=headers
            )
        except httpx.HTTPError as exc:
            raise LlmTransportError(f"chat endpoint unreachable: {exc}") from exc
        if response.status_code != 200:
            raise LlmTransportError(
                f"chat endpoint returned {response.status_code}: {response.text[:200]}"
            )
        try:
            message = response.json()["choices"][0]["message"]
        except (KeyError, IndexError, ValueError) as exc:
            raise LlmTransportError(f"malformed completion payload: {exc}") from exc
        tool_calls = []
        for tc in message.get("tool_calls") or []:
            fn = tc.get("function", {})
            try:
                arguments = json.loads(fn.get("arguments") or "{}")
            except json.JSONDecodeError as exc:
                raise ProtocolError(f"tool arguments are not JSON: {exc}") from None
            tool_calls.append(
                {"id": tc.get("id", fn.get("name", "")), "name": fn.get("name"), "arguments": arguments}
            )
        return {"content": message.get("content"), "tool_calls": tool_calls}
