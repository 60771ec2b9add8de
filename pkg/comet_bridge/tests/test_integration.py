"""End-to-end check that the translation toolkit's scorer client can drive the bridge."""

import socket
import threading
import time

import httpx
import pytest

from comet_bridge.scorers import BUILTIN_CHECKPOINT
from comet_bridge.service import create_app

icl_comet = pytest.importorskip("icl_mt.comet", reason="icl-mt not installed")


@pytest.fixture()
def bridge_url():
    import uvicorn

    with socket.socket() as probe:
        probe.bind(("127.0.0.1", 0))
        port = probe.getsockname()[1]
    app = create_app(BUILTIN_CHECKPOINT)
    server = uvicorn.Server(uvicorn.Config(app, host="127.0.0.1", port=port,
                                           log_level="error"))
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    url = f"http://127.0.0.1:{port}"
    deadline = time.monotonic() + 10
    while time.monotonic() < deadline:
        try:
            if httpx.get(f"{url}/health", timeout=1).status_code == 200:
                break
        except httpx.TransportError:
            time.sleep(0.05)
    else:
        pytest.fail("bridge server did not come up")
    yield url
    server.should_exit = True
    thread.join(timeout=5)


def test_toolkit_client_scores_through_bridge(bridge_url):
    records = [
        icl_comet.CometRecord("源一", "good translation", "good translation"),
        icl_comet.CometRecord("源二", "partial words here", "partial words there"),
        icl_comet.CometRecord("源三", "mismatch entirely", "zzz unrelated"),
    ]
    result = icl_comet.comet_scores(bridge_url, records)
    assert len(result.scores) == 3
    assert result.checkpoint == BUILTIN_CHECKPOINT
    assert result.scores[0] == max(result.scores)
    assert result.mean == pytest.approx(sum(result.scores) / 3, abs=1e-12)
