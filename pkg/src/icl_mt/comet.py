"""Client for the external COMET scoring service.

The scorer is reached either over HTTP (POST <endpoint>/score with a JSON body
of `{"records": [{"src", "mt", "ref"}, ...]}`, response
`{"scores": [...], "checkpoint": "..."}`) or by invoking a command that speaks
the same JSON, one request line on stdin and one response line on stdout. The
neural model itself lives behind that protocol and is never loaded here.
"""

from __future__ import annotations

import json
import math
import shlex
import subprocess
from dataclasses import dataclass
from typing import Sequence

import httpx


class ScorerError(Exception):
    """Base class for scorer failures."""


class ScorerUnavailable(ScorerError):
    """The scorer endpoint cannot be reached; callers may degrade to BLEU-only."""


class ScorerProtocolError(ScorerError):
    """The scorer answered, but not in the agreed shape."""


class CountMismatch(ScorerError):
    def __init__(self, expected: int, got: int):
        super().__init__(f"sent {expected} records but received {got} scores")
        self.expected = expected
        self.got = got


@dataclass(frozen=True)
class CometRecord:
    """One (source, hypothesis, reference) triple to score."""

    source: str
    hypothesis: str
    reference: str

    def __post_init__(self):
        if not (self.source and self.hypothesis and self.reference):
            raise ValueError("COMET records need non-empty source, hypothesis, and reference")


@dataclass(frozen=True)
class CometResult:
    scores: tuple[float, ...]
    mean: float
    checkpoint: str | None


def comet_scores(scorer_endpoint: str, records: Sequence[CometRecord],
                 timeout: float = 120.0) -> CometResult:
    """Score a batch of records through the external scorer.

    `scorer_endpoint` is either a base URL (http/https) or a command line to
    run in stdio mode. Returns per-record scores in order plus their mean.
    """
    if not records:
        raise ValueError("records must be non-empty")
    payload = {"records": [
        {"src": r.source, "mt": r.hypothesis, "ref": r.reference} for r in records
    ]}
    if scorer_endpoint.startswith(("http://", "https://")):
        data = _score_http(scorer_endpoint, payload, timeout)
    else:
        data = _score_command(scorer_endpoint, payload, timeout)
    scores = data.get("scores") if isinstance(data, dict) else None
    if not isinstance(scores, list):
        raise ScorerProtocolError("response is missing the 'scores' list")
    if len(scores) != len(records):
        raise CountMismatch(len(records), len(scores))
    values = []
    for i, value in enumerate(scores):
        if not isinstance(value, (int, float)) or isinstance(value, bool) or not math.isfinite(value):
            raise ScorerProtocolError(f"scores[{i}] is not a finite number")
        values.append(float(value))
    checkpoint = data.get("checkpoint")
    return CometResult(tuple(values), sum(values) / len(values),
                       checkpoint if isinstance(checkpoint, str) else None)


def _score_http(endpoint: str, payload: dict, timeout: float) -> dict:
    url = endpoint.rstrip("/")
    if not url.endswith("/score"):
        url += "/score"
    try:
        response = httpx.post(url, json=payload, timeout=timeout)
    except (httpx.TimeoutException, httpx.TransportError) as exc:
        raise ScorerUnavailable(f"cannot reach scorer: {type(exc).__name__}") from None
    if response.status_code == 503:
        raise ScorerUnavailable("scorer is still loading its model")
    if response.status_code >= 500:
        raise ScorerUnavailable(f"scorer failed with HTTP {response.status_code}")
    if response.status_code != 200:
        raise ScorerProtocolError(
            f"scorer rejected the request (HTTP {response.status_code}): {response.text[:300]}")
    try:
        return response.json()
    except (json.JSONDecodeError, ValueError):
        raise ScorerProtocolError("scorer response is not JSON") from None


def _score_command(command: str, payload: dict, timeout: float) -> dict:
    argv = shlex.split(command)
    if not argv:
        raise ScorerUnavailable("empty scorer command")
    try:
        proc = subprocess.run(
            argv, input=json.dumps(payload, ensure_ascii=False) + "\n",
            capture_output=True, text=True, timeout=timeout)
    except FileNotFoundError:
        raise ScorerUnavailable(f"scorer command not found: {argv[0]}") from None
    except subprocess.TimeoutExpired:
        raise ScorerUnavailable("scorer command timed out") from None
    if proc.returncode != 0:
        raise ScorerUnavailable(f"scorer command exited with status {proc.returncode}")
    line = proc.stdout.strip().splitlines()
    if not line:
        raise ScorerProtocolError("scorer command produced no output")
    try:
        return json.loads(line[-1])
    except json.JSONDecodeError:
        raise ScorerProtocolError("scorer command output is not JSON") from None
