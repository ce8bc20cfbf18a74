"""Text-generation backends behind one interface.

``MockBackend`` is fully deterministic and offline: for contextualized
prompts it answers extractively from the prompt's own context sections,
ranked by TF-IDF similarity to each task; without context it cycles a
fixed filler phrase list seeded by a stable hash of the prompt. The
remote backend speaks the common chat-completion wire protocol and is
configurable via base URL.
"""

from __future__ import annotations

import hashlib
import logging
import os
import re
import threading
import time
from dataclasses import dataclass
from typing import Optional

import requests

from .errors import (
    AuthError,
    BackendUnavailable,
    MalformedPrompt,
    ProtocolError,
    Timeout,
)
from .relations import tokenize

log = logging.getLogger(__name__)

API_KEY_ENV = "KGXPLAIN_API_KEY"

_TASK_RE = re.compile(
    r"^TASK (\w+) \(answer in at most (\d+) words, between <<SLOT:\w+>> and <<END>>\): (.*)$"
)
_SECTION_HEADERS = ("HIERARCHY", "RELATED", "COMMUNITY", "SUPPORTING")


@dataclass(frozen=True)
class GenerationRequest:
    system_text: str
    user_text: str
    max_words: int
    backend_id: str = "mock"


@dataclass(frozen=True)
class GenerationResult:
    text: str
    backend_id: str
    latency_ms: int


@dataclass(frozen=True)
class CallRecord:
    """Audit-log entry; never stores credentials."""

    backend_id: str
    system_chars: int
    user_chars: int
    ok: bool


# Generic study-habit filler. Its vocabulary is deliberately disjoint from
# the synthetic corpus vocabulary (tests assert the disjointness), so
# filler answers share no tokens with corpus reference texts.
FILLER_PHRASES = (
    "Steady reviewing habits reinforce durable remembering across weekly sittings.",
    "Spaced rehearsal alongside brief pauses sharpens enduring recollection noticeably.",
    "Active recalling beats passive rereading whenever examinations approach quickly.",
    "Short daily sessions accumulate toward remarkable long-term mastery eventually.",
    "Mixing varied exercises keeps motivation elevated throughout lengthy curricula.",
    "Writing succinct margin notes anchors fresh ideas firmly before sleeping.",
    "Explaining aloud exposes gaps hiding beneath comfortable familiarity surprisingly.",
    "Scheduling deliberate practice early prevents rushed cramming near deadlines.",
)


def _stable_hash(text: str) -> int:
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def _split_sentences(text: str) -> list[str]:
    parts = re.split(r"(?<=[.!?])\s+|\n+", text)
    return [p.strip() for p in parts if p.strip()]


def _context_sections(system_text: str) -> Optional[dict[str, str]]:
    """Section label -> body, or None when the prompt carries no context."""
    if "SUPPORTING CONTENT:" not in system_text:
        return None
    context = system_text.split("SUPPORTING CONTENT:", 1)[1]
    sections: dict[str, str] = {}
    current: Optional[str] = None
    lines: dict[str, list[str]] = {}
    for line in context.splitlines():
        stripped = line.strip()
        header = stripped[:-1] if stripped.endswith(":") else None
        if header in _SECTION_HEADERS:
            current = header
            lines[current] = []
        elif current is not None and stripped:
            lines[current].append(stripped)
    for label, body in lines.items():
        sections[label] = "\n".join(body)
    return sections


def _rank_sentences(sentences: list[str], query: str) -> list[str]:
    """Order by cosine-on-term-frequency similarity to the query, stable."""
    query_counts: dict[str, int] = {}
    for tok in tokenize(query):
        query_counts[tok] = query_counts.get(tok, 0) + 1
    q_norm = sum(v * v for v in query_counts.values()) ** 0.5

    def score(sentence: str) -> float:
        counts: dict[str, int] = {}
        for tok in tokenize(sentence):
            counts[tok] = counts.get(tok, 0) + 1
        dot = sum(c * query_counts.get(t, 0) for t, c in sorted(counts.items()))
        s_norm = sum(v * v for v in counts.values()) ** 0.5
        if dot == 0 or s_norm == 0 or q_norm == 0:
            return 0.0
        return dot / (s_norm * q_norm)

    indexed = list(enumerate(sentences))
    indexed.sort(key=lambda pair: (-score(pair[1]), pair[0]))
    return [s for _, s in indexed]


class MockBackend:
    """Deterministic offline generator honoring the slot-block protocol."""

    backend_id = "mock"

    def generate(self, request: GenerationRequest) -> GenerationResult:
        tasks = []
        for line in request.user_text.splitlines():
            m = _TASK_RE.match(line.strip())
            if m:
                tasks.append((m.group(1), int(m.group(2)), m.group(3)))
        if not tasks:
            raise MalformedPrompt("user text contains no slot-block task lines")

        sections = _context_sections(request.system_text)
        answers = []
        for slot, budget, statement in tasks:
            if sections is not None:
                text = self._extractive_answer(sections, statement, budget)
            else:
                text = self._filler_answer(request, slot, budget)
            answers.append(f"<<SLOT:{slot}>>{text}<<END>>")
        return GenerationResult(
            text="\n".join(answers), backend_id=self.backend_id, latency_ms=0
        )

    def _extractive_answer(self, sections: dict[str, str], statement: str, budget: int) -> str:
        # SUPPORTING carries the substantive metadata; HIERARCHY and
        # RELATED only backfill when it cannot cover the budget
        ranked: list[str] = []
        seen: set[str] = set()
        for label in ("SUPPORTING", "HIERARCHY", "RELATED"):
            sentences = _split_sentences(sections.get(label, ""))
            for sentence in _rank_sentences(sentences, statement):
                if sentence not in seen:
                    seen.add(sentence)
                    ranked.append(sentence)
        if not ranked:
            return self._cycle_words(FILLER_PHRASES, 0, budget)
        return self._cycle_words(tuple(ranked), 0, budget)

    def _filler_answer(self, request: GenerationRequest, slot: str, budget: int) -> str:
        seed = _stable_hash(request.system_text + "\x00" + request.user_text + "\x00" + slot)
        start = seed % len(FILLER_PHRASES)
        return self._cycle_words(FILLER_PHRASES, start, budget)

    @staticmethod
    def _cycle_words(phrases: tuple[str, ...], start: int, budget: int) -> str:
        """Concatenate phrases cyclically until at least ``budget`` words,
        so downstream truncation yields exactly the budget."""
        words: list[str] = []
        i = start
        while len(words) < budget:
            words.extend(phrases[i % len(phrases)].split())
            i += 1
        return " ".join(words)


@dataclass
class RemoteConfig:
    base_url: str = "https://api.openai.com/v1"
    model_name: str = "gpt-4"
    timeout_ms: int = 30000
    retries: int = 2
    max_concurrency: int = 4


class RemoteBackend:
    """Chat-completion client: POST {model, messages, max_tokens}."""

    backend_id = "remote"

    def __init__(self, config: RemoteConfig, session: Optional[requests.Session] = None):
        self.config = config
        self._session = session or requests.Session()
        self._semaphore = threading.Semaphore(config.max_concurrency)

    def generate(self, request: GenerationRequest) -> GenerationResult:
        api_key = os.environ.get(API_KEY_ENV, "")
        if not api_key:
            raise AuthError(f"no API key in ${API_KEY_ENV}")
        payload = {
            "model": self.config.model_name,
            "messages": [
                {"role": "system", "content": request.system_text},
                {"role": "user", "content": request.user_text},
            ],
            # coarse word->token factor; output is re-truncated by word budget
            "max_tokens": request.max_words * 2,
        }
        url = self.config.base_url.rstrip("/") + "/chat/completions"
        last_error: Exception = BackendUnavailable("no attempt made")
        for attempt in range(self.config.retries + 1):
            if attempt:
                time.sleep(min(2.0 ** attempt * 0.25, 4.0))
            start = time.monotonic()
            try:
                with self._semaphore:
                    resp = self._session.post(
                        url,
                        json=payload,
                        headers={"Authorization": f"Bearer {api_key}"},
                        timeout=self.config.timeout_ms / 1000.0,
                    )
            except requests.Timeout:
                last_error = Timeout(f"request to {url} timed out")
                continue
            except requests.ConnectionError as exc:
                last_error = BackendUnavailable(f"cannot reach {url}: {exc.__class__.__name__}")
                continue
            latency_ms = int((time.monotonic() - start) * 1000)
            if resp.status_code in (401, 403):
                raise AuthError(f"backend rejected credentials (HTTP {resp.status_code})")
            if resp.status_code >= 500 or resp.status_code == 429:
                last_error = BackendUnavailable(f"HTTP {resp.status_code} from backend")
                continue
            if resp.status_code != 200:
                raise ProtocolError(f"unexpected HTTP {resp.status_code}")
            try:
                text = resp.json()["choices"][0]["message"]["content"]
            except (ValueError, KeyError, IndexError, TypeError) as exc:
                raise ProtocolError(f"malformed response body: {exc}") from exc
            if not text:
                raise ProtocolError("backend returned empty text")
            return GenerationResult(
                text=text, backend_id=self.backend_id, latency_ms=latency_ms
            )
        raise last_error


class Gateway:
    """Routes generate calls to a backend and keeps a redacted audit log."""

    def __init__(self, backend):
        self.backend = backend
        self.call_log: list[CallRecord] = []
        self._lock = threading.Lock()

    def generate(self, request: GenerationRequest) -> GenerationResult:
        ok = False
        try:
            result = self.backend.generate(request)
            ok = True
            return result
        finally:
            record = CallRecord(
                backend_id=getattr(self.backend, "backend_id", "unknown"),
                system_chars=len(request.system_text),
                user_chars=len(request.user_text),
                ok=ok,
            )
            with self._lock:
                self.call_log.append(record)
            log.debug("generate backend=%s ok=%s", record.backend_id, ok)


def make_backend(name: str, remote_config: Optional[RemoteConfig] = None):
    if name == "mock":
        return MockBackend()
    if name == "remote":
        return RemoteBackend(remote_config or RemoteConfig())
    raise ValueError(f"unknown backend {name!r}")
