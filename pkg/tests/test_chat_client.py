"""Wire handling of the real chat-completion client (offline transport)."""

import json

import httpx
import pytest

from biolit.errors import LlmTransportError, ProtocolError
from biolit.ragent import TOOL_SCHEMAS, HttpChatClient


def _client_returning(payload, status=200):
    def handler(request: httpx.Request) -> httpx.Response:
        body = json.loads(request.content)
        assert body["temperature"] == 0.0
        assert body["tool_choice"] == "auto"
        assert [t["function"]["name"] for t in body["tools"]] == [
            s["name"] for s in TOOL_SCHEMAS
        ]
        return httpx.Response(status, json=payload)

    transport = httpx.MockTransport(handler)
    return HttpChatClient(
        "http://llm.test/v1", "model-x", api_key="k", client=httpx.Client(transport=transport)
    )


MESSAGES = [{"role": "user", "content": "q"}]


def test_normalizes_tool_calls():
    client = _client_returning(
        {
            "choices": [
                {
                    "message": {
                        "content": None,
                        "tool_calls": [
                            {
                                "id": "call_1",
                                "function": {
                                    "name": "find_entity_id",
                                    "arguments": '{"text": "breast cancer"}',
                                },
                            }
                        ],
                    }
                }
            ]
        }
    )
    reply = client.complete(MESSAGES, TOOL_SCHEMAS)
    assert reply["tool_calls"] == [
        {"id": "call_1", "name": "find_entity_id", "arguments": {"text": "breast cancer"}}
    ]


def test_final_content_passthrough():
    client = _client_returning({"choices": [{"message": {"content": "Summary: done"}}]})
    reply = client.complete(MESSAGES, TOOL_SCHEMAS)
    assert reply == {"content": "Summary: done", "tool_calls": []}


def test_http_error_is_transport_error():
    client = _client_returning({"error": "nope"}, status=500)
    with pytest.raises(LlmTransportError):
        client.complete(MESSAGES, TOOL_SCHEMAS)


def test_malformed_payload_is_transport_error():
    client = _client_returning({"not_choices": []})
    with pytest.raises(LlmTransportError):
        client.complete(MESSAGES, TOOL_SCHEMAS)


def test_bad_tool_arguments_is_protocol_error():
    client = _client_returning(
        {
            "choices": [
                {
                    "message": {
                        "tool_calls": [
                            {"id": "c", "function": {"name": "find_entity_id", "arguments": "{oops"}}
                        ]
                    }
                }
            ]
        }
    )
    with pytest.raises(ProtocolError):
        client.complete(MESSAGES, TOOL_SCHEMAS)


def test_unreachable_endpoint():
    def handler(request: httpx.Request) -> httpx.Response:
        raise httpx.ConnectError("refused", request=request)

    client = HttpChatClient(
        "http://llm.test/v1",
        "model-x",
        client=httpx.Client(transport=httpx.MockTransport(handler)),
    )
    with pytest.raises(LlmTransportError):
        client.complete(MESSAGES, TOOL_SCHEMAS)
