import json
import logging

import pytest
import requests

from kgxplain.communities import detect_communities
from kgxplain.context import assemble, render
from kgxplain.corpus import corpus_vocabulary
from kgxplain.errors import (
    AuthError,
    BackendUnavailable,
    MalformedPrompt,
    ProtocolError,
    Timeout,
)
from kgxplain.gateway import (
    API_KEY_ENV,
    FILLER_PHRASES,
    Gateway,
    GenerationRequest,
    MockBackend,
    RemoteBackend,
    RemoteConfig,
    _stable_hash,
    make_backend,
)
from kgxplain.prompting import (
    DEFAULT_DEFINITIONS,
    DEFAULT_ROLE,
    DEFAULT_TEMPLATE,
    build_prompt,
    fill_template,
)
from kgxplain.relations import tokenize

# frozen from hashlib.sha256(b"probe-prompt") (first 8 bytes, big endian)
PROBE_HASH = 13769004518933325982


def request_for(doc):
    return GenerationRequest(
        system_text=doc.system_text(),
        user_text=doc.user_text(),
        max_words=DEFAULT_TEMPLATE.total_budget,
        backend_id="mock",
    )


@pytest.fixture
def contextualized_request(chain):
    assignment = detect_communities(chain)
    context_text = render(assemble(chain, assignment, "o1"))
    doc = build_prompt(
        context_text, DEFAULT_ROLE, DEFAULT_DEFINITIONS, DEFAULT_TEMPLATE,
        "Linear Regression OER", "Intro to AI",
    )
    return request_for(doc)


@pytest.fixture
def plain_request():
    doc = build_prompt(
        None, DEFAULT_ROLE, DEFAULT_DEFINITIONS, DEFAULT_TEMPLATE,
        "Linear Regression OER", "Intro to AI",
    )
    return request_for(doc)


class TestMockBackend:
    def test_deterministic(self, contextualized_request, plain_request):
        backend = MockBackend()
        for request in (contextualized_request, plain_request):
            assert backend.generate(request).text == backend.generate(request).text

    def test_round_trips_through_fill_template(self, contextualized_request, plain_request):
        backend = MockBackend()
        for request in (contextualized_request, plain_request):
            explanation = fill_template(DEFAULT_TEMPLATE, backend.generate(request).text)
            for value in explanation.slot_values.values():
                assert len(value.split()) == DEFAULT_TEMPLATE.word_budget

    def test_extractive_uses_supporting_content(self, corpus_graph, corpus_assignment):
        target = "course0_topic0_oer0"
        context_text = render(assemble(corpus_graph, corpus_assignment, target))
        doc = build_prompt(
            context_text, DEFAULT_ROLE, DEFAULT_DEFINITIONS, DEFAULT_TEMPLATE,
            corpus_graph.node(target).title, "Quantitative Reasoning Goal",
        )
        text = MockBackend().generate(request_for(doc)).text
        supporting = context_text.section("SUPPORTING")
        # at least one full supporting sentence is reproduced verbatim
        first_sentence = supporting.split(". ")[0].split(": ", 1)[1] + "."
        assert first_sentence in text

    def test_filler_disjoint_from_corpus_vocabulary(self, plain_request):
        text = MockBackend().generate(plain_request).text
        answer_tokens = set(tokenize(text.replace("<<SLOT:", " ").replace("<<END>>", " ")))
        answer_tokens -= {s.lower() for s in DEFAULT_TEMPLATE.slots}
        assert answer_tokens & corpus_vocabulary() == set()

    def test_filler_vocab_lists_disjoint(self):
        filler_tokens = set()
        for phrase in FILLER_PHRASES:
            filler_tokens.update(tokenize(phrase))
        assert filler_tokens & corpus_vocabulary() == set()

    def test_different_prompts_different_filler(self):
        docs = [
            build_prompt(
                None, DEFAULT_ROLE, DEFAULT_DEFINITIONS, DEFAULT_TEMPLATE, title, "G"
            )
            for title in ("Topic Alpha", "Topic Beta")
        ]
        backend = MockBackend()
        t1 = backend.generate(request_for(docs[0])).text
        t2 = backend.generate(request_for(docs[1])).text
        assert t1 != t2

    def test_stable_hash_pinned(self):
        assert _stable_hash("probe-prompt") == PROBE_HASH

    def test_malformed_prompt(self):
        with pytest.raises(MalformedPrompt):
            MockBackend().generate(
                GenerationRequest(system_text="", user_text="no tasks", max_words=120)
            )


class FakeResponse:
    def __init__(self, status_code=200, body=None, text=""):
        self.status_code = status_code
        self._body = body
        self.text = text

    def json(self):
        if self._body is None:
            raise ValueError("no json")
        return self._body


class FakeSession:
    def __init__(self, outcomes):
        self.outcomes = list(outcomes)
        self.requests = []

    def post(self, url, json=None, headers=None, timeout=None):
        self.requests.append({"url": url, "json": json, "headers": headers})
        outcome = self.outcomes.pop(0)
        if isinstance(outcome, Exception):
            raise outcome
        return outcome


def remote(outcomes, retries=0):
    backend = RemoteBackend(
        RemoteConfig(base_url="https://llm.example/v1", retries=retries),
        session=FakeSession(outcomes),
    )
    return backend


@pytest.fixture(autouse=True)
def api_key(monkeypatch):
    monkeypatch.setenv(API_KEY_ENV, "sk-secret-test-key")


def ok_body(content="<<SLOT:a>>x<<END>>"):
    return {"choices": [{"message": {"content": content}}]}


class TestRemoteBackend:
    def request(self):
        return GenerationRequest(system_text="s", user_text="u", max_words=120)

    def test_wire_format(self):
        backend = remote([FakeResponse(200, ok_body())])
        result = backend.generate(self.request())
        assert result.text == "<<SLOT:a>>x<<END>>"
        sent = backend._session.requests[0]
        assert sent["url"] == "https://llm.example/v1/chat/completions"
        assert sent["json"]["model"] == "gpt-4"
        assert sent["json"]["max_tokens"] == 240
        assert [m["role"] for m in sent["json"]["messages"]] == ["system", "user"]

    def test_missing_key(self, monkeypatch):
        monkeypatch.delenv(API_KEY_ENV)
        with pytest.raises(AuthError):
            remote([]).generate(self.request())

    def test_invalid_credential(self):
        with pytest.raises(AuthError):
            remote([FakeResponse(401)]).generate(self.request())

    def test_timeout_after_retries(self):
        with pytest.raises(Timeout):
            remote([requests.Timeout(), requests.Timeout()], retries=1).generate(
                self.request()
            )

    def test_retry_then_success(self):
        backend = remote(
            [FakeResponse(503), FakeResponse(200, ok_body())], retries=1
        )
        assert backend.generate(self.request()).text == "<<SLOT:a>>x<<END>>"

    def test_unreachable(self):
        with pytest.raises(BackendUnavailable):
            remote([requests.ConnectionError()]).generate(self.request())

    def test_protocol_error_on_bad_body(self):
        with pytest.raises(ProtocolError):
            remote([FakeResponse(200, {"nope": []})]).generate(self.request())

    def test_error_messages_never_leak_key(self):
        for outcomes in ([FakeResponse(401)], [FakeResponse(200, {"bad": 1})]):
            with pytest.raises(Exception) as err:
                remote(outcomes).generate(self.request())
            assert "sk-secret-test-key" not in str(err.value)


class TestGateway:
    def test_audit_log_records_calls(self, plain_request):
        gateway = Gateway(MockBackend())
        gateway.generate(plain_request)
        assert len(gateway.call_log) == 1
        assert gateway.call_log[0].ok
        assert gateway.call_log[0].backend_id == "mock"

    def test_failed_call_logged(self):
        gateway = Gateway(MockBackend())
        with pytest.raises(MalformedPrompt):
            gateway.generate(
                GenerationRequest(system_text="", user_text="nope", max_words=10)
            )
        assert gateway.call_log[0].ok is False

    def test_log_records_contain_no_secrets(self, plain_request, caplog):
        gateway = Gateway(MockBackend())
        with caplog.at_level(logging.DEBUG):
            gateway.generate(plain_request)
        dumped = json.dumps([r.__dict__ for r in gateway.call_log]) + caplog.text
        assert "sk-secret-test-key" not in dumped

    def test_make_backend(self):
        assert isinstance(make_backend("mock"), MockBackend)
        assert isinstance(make_backend("remote"), RemoteBackend)
        with pytest.raises(ValueError):
            make_backend("psychic")
