"""HTTP scoring service: POST /score and GET /health.

Requests are serialized through a single model instance; /health and /score
both answer 503 until the scorer has finished loading, so a 200 health check
guarantees the service can actually score.
"""

from __future__ import annotations

import threading

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .scorers import load_scorer


class ScoreRecord(BaseModel):
    src: str = Field(min_length=1)
    mt: str = Field(min_length=1)
    ref: str = Field(min_length=1)


class ScoreRequest(BaseModel):
    records: list[ScoreRecord]


def _field_path(loc) -> str:
    """Render a pydantic error location like ('body','records',0,'ref') as records[0].ref."""
    parts = []
    for piece in loc:
        if piece == "body":
            continue
        if isinstance(piece, int):
            parts.append(f"[{piece}]")
        else:
            parts.append(f".{piece}" if parts else str(piece))
    return "".join(parts)


def create_app(checkpoint: str, defer_load: bool = False) -> FastAPI:
    """Build the service app; with defer_load the scorer starts unloaded.

    Call `app.state.load()` (typically from a background thread) to load a
    deferred scorer.
    """
    app = FastAPI(title="comet-bridge")
    app.state.scorer = None if defer_load else load_scorer(checkpoint)
    app.state.checkpoint = checkpoint
    app.state.load_error = None
    app.state.lock = threading.Lock()

    def _load():
        try:
            app.state.scorer = load_scorer(checkpoint)
        except Exception as exc:  # keep serving 503s with the reason
            app.state.load_error = str(exc)

    app.state.load = _load

    @app.exception_handler(RequestValidationError)
    async def _validation_error(request: Request, exc: RequestValidationError):
        first = exc.errors()[0]
        return JSONResponse(
            status_code=400,
            content={"detail": f"{_field_path(first['loc'])}: {first['msg']}"},
        )

    @app.get("/health")
    def health():
        if app.state.scorer is None:
            status = "failed" if app.state.load_error else "loading"
            return JSONResponse(
                status_code=503,
                content={"status": status, "checkpoint": checkpoint,
                         "error": app.state.load_error})
        return {"status": "ok", "checkpoint": app.state.scorer.checkpoint}

    @app.post("/score")
    def score(request: ScoreRequest):
        scorer = app.state.scorer
        if scorer is None:
            return JSONResponse(status_code=503,
                                content={"detail": "model is still loading"})
        records = [{"src": r.src, "mt": r.mt, "ref": r.ref} for r in request.records]
        with app.state.lock:  # one batch at a time through the model
            scores = scorer.score_batch(records)
        return {"scores": scores, "checkpoint": scorer.checkpoint}

    return app
