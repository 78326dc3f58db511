"""Scripted chat clients for offline agent runs.

Each mock follows the ``complete(messages, tools, temperature)`` protocol
of :func:`biolit.ragent.orchestrate` and plays one answering strategy:

* :class:`GroundedMock` — the three-step tool flow (entity id, related
  entities, evidence export) citing only exported PMIDs;
* :class:`SearchOnlyMock` — no relation grounding: cites articles that
  merely mention the entities, keyword-search style;
* :class:`NoToolMock` — answers from "memory" with fabricated PMIDs;
* :class:`FabricatorMock` — grounded flow plus injected fake citations;
* :class:`OverBudgetMock` — never stops requesting tool calls.

Question plans map the eight fixture questions to the entity text,
relation type, and target entity type the scripts should use.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .docmodel import EntityType, key_entity_type
from .index import IndexSnapshot
from .querylang import resolve_free_term, suggest


@dataclass(frozen=True)
class QuestionPlan:
    entity_text: str
    rtype: str
    target_type: str  # EntityType value


QUESTION_PLANS: dict[str, QuestionPlan] = {
    "q1": QuestionPlan("tocilizumab", "cause", "Disease"),
    "q2": QuestionPlan("memory deficits", "cause", "Chemical"),
    "q3": QuestionPlan("cocaine", "treat", "Disease"),
    "q4": QuestionPlan("doxorubicin", "treat", "Disease"),
    "q5": QuestionPlan("cocaine", "interact", "Gene"),
    "q6": QuestionPlan("breast cancer", "treat", "Chemical"),
    "q7": QuestionPlan("Scleroderma", "treat", "Chemical"),
    "q8": QuestionPlan("finasteride", "treat", "Disease"),
}


def _claims_json(claims: list[dict]) -> str:
    return "Claims-JSON: " + json.dumps({"claims": claims})


def _final_message(prose: str, claims: list[dict]) -> dict:
    return {"content": f"Summary: {prose}\n{_claims_json(claims)}", "tool_calls": []}


def _last_tool_result(messages: list[dict]):
    for message in reversed(messages):
        if message.get("role") == "tool":
            return json.loads(message["content"])
    return None


class GroundedMock:
    """Entity id → related entities → evidence export → cited summary."""

    def __init__(self, plan: QuestionPlan):
        self.plan = plan
        self.step = 0
        self._key: str | None = None
        self._related: str | None = None

    def complete(self, messages, tools, temperature=0.0) -> dict:
        plan = self.plan
        if self.step == 0:
            self.step = 1
            return {
                "content": None,
                "tool_calls": [
                    {"id": "c1", "name": "find_entity_id", "arguments": {"text": plan.entity_text}}
                ],
            }
        if self.step == 1:
            keys = _last_tool_result(messages) or []
            if not keys:
                return _final_message(f"no entity found for {plan.entity_text!r}.", [])
            self._key = keys[0]
            self.step = 2
            return {
                "content": None,
                "tool_calls": [
                    {
                        "id": "c2",
                        "name": "find_related_entities",
                        "arguments": {
                            "entity": self._key,
                            "type": plan.rtype,
                            "target_type": plan.target_type,
                        },
                    }
                ],
            }
        if self.step == 2:
            rows = _last_tool_result(messages) or []
            if not rows:
                return _final_message(
                    f"no {plan.rtype} relations recorded for {self._key}.", []
                )
            self._related = rows[0]["entity"]
            self.step = 3
            return {
                "content": None,
                "tool_calls": [
                    {
                        "id": "c3",
                        "name": "export_relevant_search_results",
                        "arguments": {"e1": self._key, "type": plan.rtype, "e2": self._related},
                    }
                ],
            }
        pmids = _last_tool_result(messages) or []
        claims = [
            {"subject": self._key, "type": plan.rtype, "object": self._related, "pmids": pmids}
        ]
        prose = (
            f"{self._related} has a {plan.rtype} relation with {self._key}; "
            f"evidence in PMIDs {', '.join(map(str, pmids))}."
        )
        return _final_message(prose, claims)


class FabricatorMock(GroundedMock):
    """Grounded flow, then pads the citation list with fake PMIDs."""

    def __init__(self, plan: QuestionPlan, fake_pmids: tuple[int, ...] = (9999999,)):
        super().__init__(plan)
        self.fake_pmids = fake_pmids

    def complete(self, messages, tools, temperature=0.0) -> dict:
        reply = super().complete(messages, tools, temperature)
        if reply.get("tool_calls"):
            return reply
        content = reply["content"]
        head, _, raw = content.partition("Claims-JSON: ")
        payload = json.loads(raw)
        for claim in payload["claims"]:
            claim["pmids"] = list(claim["pmids"]) + list(self.fake_pmids)
        return {"content": head + "Claims-JSON: " + json.dumps(payload), "tool_calls": []}


def _resolve_key(snapshot: IndexSnapshot, text: str) -> str | None:
    key = resolve_free_term(text, snapshot)
    if key:
        return key
    suggestions = suggest(text, snapshot, 1)
    return suggestions[0].semantic_key if suggestions else None


def _cooccurring_target(
    snapshot: IndexSnapshot, key: str, target_type: str
) -> str | None:
    """Most frequently document-co-occurring entity of the target type."""
    docs = snapshot.entity_pmids(key)
    best: tuple[int, str] | None = None
    for other in snapshot.entity_postings:
        if other == key or key_entity_type(other) is not EntityType(target_type):
            continue
        shared = len(docs & snapshot.entity_pmids(other))
        if shared == 0:
            continue
        if best is None or (-shared, other) < (-best[0], best[1]):
            best = (shared, other)
    return best[1] if best else None


class SearchOnlyMock:
    """Cites every article mentioning either entity, relation or not."""

    def __init__(self, plan: QuestionPlan, snapshot: IndexSnapshot, cap: int = 5):
        self.plan = plan
        self.snapshot = snapshot
        self.cap = cap

    def complete(self, messages, tools, temperature=0.0) -> dict:
        key = _resolve_key(self.snapshot, self.plan.entity_text)
        if key is None:
            return _final_message("no matching articles found.", [])
        target = _cooccurring_target(self.snapshot, key, self.plan.target_type)
        if target is None:
            return _final_message(f"no candidate entities found near {key}.", [])
        cited = sorted(self.snapshot.entity_pmids(key) | self.snapshot.entity_pmids(target))
        cited = cited[: self.cap]
        claims = [
            {"subject": key, "type": self.plan.rtype, "object": target, "pmids": cited}
        ]
        return _final_message(
            f"articles mentioning {key} or {target}: {', '.join(map(str, cited))}.",
            claims,
        )


class NoToolMock:
    """Answers from parametric memory with made-up citations."""

    def __init__(self, plan: QuestionPlan, snapshot: IndexSnapshot, seed: int = 0):
        self.plan = plan
        self.snapshot = snapshot
        self.seed = seed

    def complete(self, messages, tools, temperature=0.0) -> dict:
        key = _resolve_key(self.snapshot, self.plan.entity_text)
        target = (
            _cooccurring_target(self.snapshot, key, self.plan.target_type) if key else None
        )
        if key is None or target is None:
            return _final_message("answered without citations.", [])
        fakes = [9990000 + self.seed * 10 + i for i in range(2)]
        claims = [
            {"subject": key, "type": self.plan.rtype, "object": target, "pmids": fakes}
        ]
        return _final_message(
            f"{target} is related to {key} (PMIDs {fakes[0]}, {fakes[1]}).", claims
        )


class OverBudgetMock:
    """Requests one more lookup forever; exercises budget enforcement."""

    def __init__(self, text: str = "breast cancer"):
        self.text = text
        self.n = 0

    def complete(self, messages, tools, temperature=0.0) -> dict:
        self.n += 1
        return {
            "content": None,
            "tool_calls": [
                {
                    "id": f"c{self.n}",
                    "name": "find_entity_id",
                    "arguments": {"text": self.text},
                }
            ],
        }


def mock_for(mode: str, qid: str, snapshot: IndexSnapshot):
    """Factory used by the evaluation harness: mode is one of
    ``grounded``, ``search-only``, ``no-tool``."""
    plan = QUESTION_PLANS[qid]
    if mode == "grounded":
        return GroundedMock(plan)
    if mode == "search-only":
        return SearchOnlyMock(plan, snapshot)
    if mode == "no-tool":
        return NoToolMock(plan, snapshot, seed=int(qid[1:]))
    raise ValueError(f"unknown mock mode {mode!r}")
