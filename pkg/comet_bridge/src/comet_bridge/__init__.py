"""Scoring microservice that wraps a COMET checkpoint behind a small JSON protocol."""

from .scorers import (BUILTIN_CHECKPOINT, ChrfSurrogateScorer, CometCheckpointScorer,
                      ScorerLoadError, load_scorer)
from .service import create_app

__version__ = "0.1.0"

__all__ = [
    "BUILTIN_CHECKPOINT", "ChrfSurrogateScorer", "CometCheckpointScorer",
    "ScorerLoadError", "create_app", "load_scorer",
]
