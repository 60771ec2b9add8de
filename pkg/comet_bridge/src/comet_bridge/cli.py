"""comet-bridge entry point: HTTP serve mode or line-oriented stdio mode."""

from __future__ import annotations

import argparse
import sys
import threading

from .scorers import DEFAULT_CHECKPOINT, ScorerLoadError, load_scorer
from .service import create_app
from .stdio import run_stdio


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="comet-bridge", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="run the HTTP scoring service")
    serve.add_argument("--checkpoint", default=DEFAULT_CHECKPOINT,
                       help="model id, e.g. Unbabel/wmt22-comet-da, or the builtin surrogate")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8700)

    stdio = sub.add_parser("stdio", help="one JSON request per stdin line")
    stdio.add_argument("--checkpoint", default=DEFAULT_CHECKPOINT)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "stdio":
        try:
            scorer = load_scorer(args.checkpoint)
        except ScorerLoadError as exc:
            print(f"comet-bridge: {exc}", file=sys.stderr)
            return 2
        run_stdio(scorer, sys.stdin, sys.stdout)
        return 0

    import uvicorn

    # bind the port immediately and load the model in the background; /health
    # answers 503 until loading completes
    app = create_app(args.checkpoint, defer_load=True)
    loader = threading.Thread(target=app.state.load, daemon=True)
    loader.start()
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


if __name__ == "__main__":
    sys.exit(main())
