"""Chat-completions HTTP client with retries, plus a deterministic mock backend.

The wire shape is the standard chat-completions contract: POST a JSON body of
`{model, messages, temperature}` with a bearer token and read the reply at
`choices[0].message.content`. Transient failures (HTTP 429, 5xx, timeouts) are
retried with exponential backoff; other 4xx are never retried. The API key is
read from the environment and kept out of logs and error messages.
"""

from __future__ import annotations

import hashlib
import json
import os
import random
import threading
import time
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import httpx

from .prompting import ChatMessage

API_KEY_ENV = "ICL_API_KEY"
RETRYABLE_STATUSES = frozenset({429, 500, 502, 503, 504})


class LlmError(Exception):
    """Base class for chat backend failures."""


class AuthError(LlmError):
    def __init__(self, status: int):
        super().__init__(f"authentication rejected (HTTP {status})")
        self.status = status


class RateLimited(LlmError):
    def __init__(self, attempts: int):
        super().__init__(f"still rate limited after {attempts} attempts")
        self.attempts = attempts


class BackendError(LlmError):
    def __init__(self, status: int | None, body: str):
        detail = f"HTTP {status}" if status is not None else "transport failure"
        super().__init__(f"backend error ({detail}): {body[:500]}")
        self.status = status
        self.body = body


class MalformedResponse(LlmError):
    pass


@dataclass
class BackendConfig:
    endpoint_url: str
    model_name: str
    api_key: str = field(default="", repr=False)
    timeout: float = 60.0
    max_retries: int = 3
    temperature: float = 0.0
    backoff_base: float = 1.0
    max_in_flight: int = 1

    def __post_init__(self):
        if self.timeout <= 0:
            raise ValueError("timeout must be positive")
        if self.max_retries < 0:
            raise ValueError("max_retries must be nonnegative")
        if not 0.0 <= self.temperature <= 2.0:
            raise ValueError("temperature must be within [0, 2]")
        if self.max_in_flight < 1:
            raise ValueError("max_in_flight must be at least 1")

    def resolve_api_key(self) -> str:
        return self.api_key or os.environ.get(API_KEY_ENV, "")


@dataclass(frozen=True)
class CompletionResult:
    text: str
    latency_ms: float
    attempt_count: int

    def __post_init__(self):
        if self.attempt_count < 1:
            raise ValueError("attempt_count must be at least 1")


def _messages_payload(messages: Sequence[ChatMessage]) -> list[dict]:
    return [{"role": m.role, "content": m.content} for m in messages]


def message_hash(messages: Sequence[ChatMessage]) -> str:
    """Stable digest of a message sequence, usable as a mock script key."""
    canonical = json.dumps(_messages_payload(messages), ensure_ascii=False, sort_keys=True)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


class HttpChatBackend:
    """Reusable client for one chat-completions endpoint.

    Safe to share across threads; concurrent requests are capped by the
    config's max_in_flight semaphore.
    """

    def __init__(self, config: BackendConfig, transport: httpx.BaseTransport | None = None):
        self.config = config
        self._client = httpx.Client(timeout=config.timeout, transport=transport)
        self._slots = threading.BoundedSemaphore(config.max_in_flight)
        self._rng = random.Random()

    def close(self) -> None:
        self._client.close()

    def complete_chat(self, messages: Sequence[ChatMessage]) -> CompletionResult:
        if not messages:
            raise ValueError("messages must be non-empty")
        body = {
            "model": self.config.model_name,
            "messages": _messages_payload(messages),
            "temperature": self.config.temperature,
        }
        headers = {"Authorization": f"Bearer {self.config.resolve_api_key()}"}
        started = time.monotonic()
        attempts = self.config.max_retries + 1
        last_status: int | None = None
        last_body = ""
        with self._slots:
            for attempt in range(1, attempts + 1):
                try:
                    response = self._client.post(
                        self.config.endpoint_url, json=body, headers=headers)
                except (httpx.TimeoutException, httpx.TransportError) as exc:
                    last_status, last_body = None, type(exc).__name__
                    if attempt == attempts:
                        break
                    self._sleep(attempt)
                    continue
                if response.status_code in (401, 403):
                    raise AuthError(response.status_code)
                if response.status_code in RETRYABLE_STATUSES:
                    last_status, last_body = response.status_code, response.text
                    if attempt == attempts:
                        break
                    self._sleep(attempt)
                    continue
                if response.status_code != 200:
                    raise BackendError(response.status_code, response.text)
                latency_ms = (time.monotonic() - started) * 1000.0
                return CompletionResult(_extract_text(response), latency_ms, attempt)
        if last_status == 429:
            raise RateLimited(attempts)
        raise BackendError(last_status, last_body)

    def _sleep(self, attempt: int) -> None:
        delay = self.config.backoff_base * (2 ** (attempt - 1))
        time.sleep(delay * (1.0 + 0.1 * self._rng.random()))


def _extract_text(response: httpx.Response) -> str:
    try:
        data = response.json()
    except (json.JSONDecodeError, ValueError) as exc:
        raise MalformedResponse(f"response is not JSON: {exc}") from None
    try:
        content = data["choices"][0]["message"]["content"]
    except (KeyError, IndexError, TypeError):
        raise MalformedResponse("missing choices[0].message.content") from None
    if not isinstance(content, str):
        raise MalformedResponse("message content is not a string")
    return content.strip()


def complete_chat(config: BackendConfig, messages: Sequence[ChatMessage]) -> CompletionResult:
    """One-shot convenience wrapper around HttpChatBackend."""
    backend = HttpChatBackend(config)
    try:
        return backend.complete_chat(messages)
    finally:
        backend.close()


_EXAMPLES_MARKER = "Here are some examples"


class MockChatBackend:
    """Deterministic offline backend.

    Replies come from the script when one matches (first by call ordinal, then
    by message hash). Unscripted calls echo the user message when `echo_user`
    is set; otherwise they reply with the target text of the first example
    block found in the system message, or the literal "MOCK" when the prompt
    carries no examples. That default makes retrieve-ICL pipelines
    reproducible end to end: a pool containing the test source verbatim
    retrieves itself first, and the mock then emits its reference.
    """

    model_name = "mock"

    def __init__(self, script: Mapping[int | str, str] | None = None, echo_user: bool = False):
        self.script = dict(script or {})
        self.echo_user = echo_user
        self._calls = 0
        self._lock = threading.Lock()

    def complete_chat(self, messages: Sequence[ChatMessage]) -> CompletionResult:
        if not messages:
            raise ValueError("messages must be non-empty")
        with self._lock:
            ordinal = self._calls
            self._calls += 1
        if ordinal in self.script:
            text = self.script[ordinal]
        elif message_hash(messages) in self.script:
            text = self.script[message_hash(messages)]
        elif self.echo_user:
            text = next((m.content for m in reversed(messages) if m.role == "user"), "MOCK")
        else:
            text = _first_example_target(messages)
        return CompletionResult(text, 0.0, 1)


def _first_example_target(messages: Sequence[ChatMessage]) -> str:
    for message in messages:
        if message.role != "system" or _EXAMPLES_MARKER not in message.content:
            continue
        lines = message.content.split(_EXAMPLES_MARKER, 1)[1].split("\n")
        for i in range(len(lines) - 1):
            if _block_line_text(lines[i]) is not None:
                target = _block_line_text(lines[i + 1])
                if target is not None:
                    return target
    return "MOCK"


def _block_line_text(line: str) -> str | None:
    """Text after the language label of a `Name: text` example line."""
    head, sep, rest = line.partition(": ")
    if sep and head and rest:
        return rest
    return None


def backend_from_config(config: Mapping) -> HttpChatBackend | MockChatBackend:
    """Build a backend from a config mapping (the `backend` section of a run config).

    kind "mock" takes `echo_user`; kind "http" (the default) takes the
    BackendConfig fields, with the API key resolved from `api_key_env`
    (default ICL_API_KEY) unless `api_key` is given explicitly.
    """
    kind = config.get("kind", "http")
    if kind == "mock":
        return MockChatBackend(echo_user=bool(config.get("echo_user", False)))
    if kind != "http":
        raise ValueError(f"unknown backend kind {kind!r}")
    api_key = config.get("api_key", "")
    if not api_key:
        api_key = os.environ.get(config.get("api_key_env", API_KEY_ENV), "")
    return HttpChatBackend(BackendConfig(
        endpoint_url=config["endpoint_url"],
        model_name=config["model_name"],
        api_key=api_key,
        timeout=float(config.get("timeout", 60.0)),
        max_retries=int(config.get("max_retries", 3)),
        temperature=float(config.get("temperature", 0.0)),
        backoff_base=float(config.get("backoff_base", 1.0)),
        max_in_flight=int(config.get("max_in_flight", 1)),
    ))
