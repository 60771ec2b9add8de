"""Scorer backends: a real COMET checkpoint, or a built-in lexical surrogate.

The surrogate exists so the service and its protocol can run on machines with
no GPU, no network, and no model cache. It is a character n-gram F-score
between hypothesis and reference, not a neural metric; reports must read its
checkpoint id to know which scorer produced the numbers.
"""

from __future__ import annotations

from collections import Counter

BUILTIN_CHECKPOINT = "builtin:chrf2-lexical-v1"
DEFAULT_CHECKPOINT = BUILTIN_CHECKPOINT

CHRF_MAX_ORDER = 6
CHRF_BETA = 2.0


class ScorerLoadError(Exception):
    """The requested checkpoint cannot be loaded in this environment."""


class ChrfSurrogateScorer:
    """Deterministic lexical scorer: mean character n-gram F2 of mt against ref.

    Scores lie in [0, 1]; an exact match scores 1.0 and any reordering of the
    words scores strictly less (higher-order n-grams break). The source text
    is accepted for interface parity but does not influence the score.
    """

    checkpoint = BUILTIN_CHECKPOINT

    def score_batch(self, records: list[dict]) -> list[float]:
        return [self._score(r["mt"], r["ref"]) for r in records]

    @staticmethod
    def _score(mt: str, ref: str) -> float:
        f_scores = []
        for n in range(1, CHRF_MAX_ORDER + 1):
            hyp_grams = Counter(mt[i:i + n] for i in range(len(mt) - n + 1))
            ref_grams = Counter(ref[i:i + n] for i in range(len(ref) - n + 1))
            hyp_total = sum(hyp_grams.values())
            ref_total = sum(ref_grams.values())
            if hyp_total == 0 and ref_total == 0:
                continue
            overlap = sum((hyp_grams & ref_grams).values())
            precision = overlap / hyp_total if hyp_total else 0.0
            recall = overlap / ref_total if ref_total else 0.0
            if precision + recall == 0.0:
                f_scores.append(0.0)
                continue
            beta_sq = CHRF_BETA * CHRF_BETA
            f_scores.append((1 + beta_sq) * precision * recall
                            / (beta_sq * precision + recall))
        return sum(f_scores) / len(f_scores) if f_scores else 0.0


class CometCheckpointScorer:
    """Wraps a pretrained COMET model loaded through the unbabel-comet library.

    Inference runs on CPU unless the library picks up a GPU; dropout is off in
    eval mode, so identical batches score identically.
    """

    def __init__(self, checkpoint: str):
        try:
            from comet import download_model, load_from_checkpoint
        except ImportError as exc:
            raise ScorerLoadError(
                f"checkpoint {checkpoint!r} needs the unbabel-comet package "
                f"(pip install 'comet-bridge[comet]'): {exc}") from None
        self.checkpoint = checkpoint
        model_path = download_model(checkpoint)
        self._model = load_from_checkpoint(model_path)
        self._model.eval()

    def score_batch(self, records: list[dict]) -> list[float]:
        output = self._model.predict(
            [{"src": r["src"], "mt": r["mt"], "ref": r["ref"]} for r in records],
            batch_size=8, gpus=0, num_workers=0, progress_bar=False)
        scores = output.scores if hasattr(output, "scores") else output[0]
        return [float(s) for s in scores]


def load_scorer(checkpoint: str):
    """Instantiate the scorer for a checkpoint id; builtin ids never hit the network."""
    if checkpoint.startswith("builtin:"):
        if checkpoint != BUILTIN_CHECKPOINT:
            raise ScorerLoadError(f"unknown builtin checkpoint {checkpoint!r}")
        return ChrfSurrogateScorer()
    return CometCheckpointScorer(checkpoint)
