"""Line-oriented stdio mode for air-gapped rigs.

One JSON request per input line (`{"records": [{"src","mt","ref"}, ...]}`),
one JSON response per output line (`{"scores": [...], "checkpoint": "..."}`)
or `{"error": "..."}` on a bad request; the process keeps reading either way.
"""

from __future__ import annotations

import json
from typing import IO

from pydantic import ValidationError

from .service import ScoreRequest


def run_stdio(scorer, stdin: IO[str], stdout: IO[str]) -> None:
    for line in stdin:
        line = line.strip()
        if not line:
            continue
        try:
            # invalid JSON also surfaces as a ValidationError in pydantic 2
            request = ScoreRequest.model_validate_json(line)
        except ValidationError as exc:
            first = exc.errors()[0]
            _emit(stdout, {"error": f"{first['loc']}: {first['msg']}"})
            continue
        records = [{"src": r.src, "mt": r.mt, "ref": r.ref} for r in request.records]
        _emit(stdout, {"scores": scorer.score_batch(records),
                       "checkpoint": scorer.checkpoint})


def _emit(stdout: IO[str], payload: dict) -> None:
    stdout.write(json.dumps(payload, ensure_ascii=False) + "\n")
    stdout.flush()
