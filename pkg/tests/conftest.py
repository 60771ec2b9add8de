"""Shared fixtures: corpus builders and a scripted chat-completions test server."""

from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, HTTPServer

import pytest

from icl_mt.corpus import LangPair, ParallelCorpus, SentencePair


def make_corpus(pairs: list[tuple[str, str]], lang_pair: LangPair | None = None) -> ParallelCorpus:
    lp = lang_pair or LangPair("zh", "en")
    return ParallelCorpus(lp, tuple(
        SentencePair(src, tgt, i) for i, (src, tgt) in enumerate(pairs)
    ))


@pytest.fixture
def zh_en():
    return LangPair("zh", "en")


@pytest.fixture
def corpus_files(tmp_path):
    """Write line-aligned source/target files and return their paths."""

    def _write(src_lines: list[str], tgt_lines: list[str], stem: str = "corpus"):
        src = tmp_path / f"{stem}.src"
        tgt = tmp_path / f"{stem}.tgt"
        src.write_text("".join(line + "\n" for line in src_lines), encoding="utf-8")
        tgt.write_text("".join(line + "\n" for line in tgt_lines), encoding="utf-8")
        return src, tgt

    return _write


def write_experiment_data(tmp_path, n_pool: int = 30, n_test: int = 6,
                          plant_tests_in_pool: bool = True) -> dict:
    """Write a small vi-en corpus pair on disk and return an experiment config dict.

    Pool sentences carry per-sentence unique tokens; when
    plant_tests_in_pool is set, the test sentences are the first n_test pool
    entries verbatim, so retrieval can hit them exactly.
    """
    sources = [f"nguon cau {i} alpha{i} beta{i} gamma{i}" for i in range(n_pool)]
    targets = [f"target sentence {i} apple{i} pear{i} plum{i}" for i in range(n_pool)]
    if plant_tests_in_pool:
        test_sources = sources[:n_test]
        test_targets = targets[:n_test]
    else:
        test_sources = [f"thu cau {i} delta{i}" for i in range(n_test)]
        test_targets = [f"held out sentence {i} quince{i}" for i in range(n_test)]
    paths = {}
    for name, lines in [("train.src", sources), ("train.tgt", targets),
                        ("test.src", test_sources), ("test.tgt", test_targets)]:
        path = tmp_path / name
        path.write_text("".join(line + "\n" for line in lines), encoding="utf-8")
        paths[name] = str(path)
    return {
        "lang_pairs": ["vi-en"],
        "scenarios": ["zero_shot", "random_k", "retrieve_k"],
        "data": {"vi-en": {
            "train_src": paths["train.src"], "train_tgt": paths["train.tgt"],
            "test_src": paths["test.src"], "test_tgt": paths["test.tgt"],
        }},
        "backend": {"kind": "mock"},
        "k": 4,
        "pool_size": n_pool,
        "test_size": n_test,
        "seed": 1234,
    }


class _ScriptedHandler(BaseHTTPRequestHandler):
    def do_POST(self):
        length = int(self.headers.get("Content-Length", 0))
        body = self.rfile.read(length)
        server = self.server
        server.requests.append({
            "path": self.path,
            "headers": dict(self.headers),
            "body": json.loads(body) if body else None,
        })
        status, payload = server.script[min(len(server.requests) - 1, len(server.script) - 1)]
        data = payload if isinstance(payload, bytes) else json.dumps(payload).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)

    def log_message(self, *args):
        pass


class ScriptedServer:
    """Tiny HTTP server that replays a scripted sequence of (status, payload)."""

    def __init__(self, script: list[tuple[int, object]]):
        self.httpd = HTTPServer(("127.0.0.1", 0), _ScriptedHandler)
        self.httpd.script = script
        self.httpd.requests = []
        self.thread = threading.Thread(target=self.httpd.serve_forever, daemon=True)

    def __enter__(self):
        self.thread.start()
        return self

    def __exit__(self, *exc):
        self.httpd.shutdown()
        self.httpd.server_close()

    @property
    def url(self) -> str:
        host, port = self.httpd.server_address
        return f"http://{host}:{port}"

    @property
    def requests(self) -> list[dict]:
        return self.httpd.requests
