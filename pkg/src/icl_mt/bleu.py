"""Corpus-level BLEU with clipped n-gram precisions and a brevity penalty.

Aggregation is corpus-level in the classic sense: clipped match and candidate
counts are summed over all segments per n-gram order before the precisions are
formed, and the brevity penalty uses the summed lengths. A mean-of-sentence
variant with count smoothing is available separately for sensitivity checks.
Scores are on a 0..1 scale. Single reference per hypothesis.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

from .tokenization import TokenSeq

MAX_ORDER = 4


class LengthMismatch(ValueError):
    def __init__(self, hyp_count: int, ref_count: int):
        super().__init__(f"{hyp_count} hypotheses vs {ref_count} references")
        self.hyp_count = hyp_count
        self.ref_count = ref_count


@dataclass(frozen=True)
class NGramStats:
    """Clipped matches and candidate totals for one n-gram order."""

    order: int
    clipped_matches: int
    candidate_total: int

    def __post_init__(self):
        if self.clipped_matches > self.candidate_total:
            raise ValueError("clipped matches cannot exceed candidate total")


@dataclass(frozen=True)
class BleuScore:
    score: float
    precisions: tuple[float, float, float, float]
    brevity_penalty: float
    hyp_length: int
    ref_length: int
    zero_precision: bool = False


def _ngram_counts(tokens: tuple[str, ...], n: int) -> Counter:
    return Counter(tokens[i:i + n] for i in range(len(tokens) - n + 1))


def modified_ngram_stats(hypothesis: TokenSeq, reference: TokenSeq, n: int) -> NGramStats:
    """Clipped n-gram matches of one hypothesis against its reference.

    Each distinct hypothesis n-gram is credited at most as often as it occurs
    in the reference; the candidate total is the hypothesis n-gram count.
    """
    if n < 1:
        raise ValueError("n-gram order must be at least 1")
    hyp_counts = _ngram_counts(hypothesis.tokens, n)
    ref_counts = _ngram_counts(reference.tokens, n)
    clipped = sum(min(count, ref_counts[gram]) for gram, count in hyp_counts.items())
    total = max(len(hypothesis) - n + 1, 0)
    return NGramStats(n, clipped, total)


def brevity_penalty(hyp_len: int, ref_len: int) -> float:
    """1 when the hypothesis is longer than the reference, else exp(1 - r/c)."""
    if ref_len <= 0:
        raise ValueError("reference length must be positive")
    if hyp_len == 0:
        return 0.0
    if hyp_len > ref_len:
        return 1.0
    return math.exp(1.0 - ref_len / hyp_len)


def corpus_bleu(hypotheses: Sequence[TokenSeq], references: Sequence[TokenSeq]) -> BleuScore:
    """BLEU over a corpus of single-reference segments.

    A corpus where some order has no candidates or no matches scores 0.0 with
    the zero_precision flag set, never NaN.
    """
    if len(hypotheses) != len(references):
        raise LengthMismatch(len(hypotheses), len(references))
    if not hypotheses:
        raise ValueError("cannot score an empty corpus")
    clipped = [0] * MAX_ORDER
    totals = [0] * MAX_ORDER
    hyp_length = 0
    ref_length = 0
    for hyp, ref in zip(hypotheses, references):
        hyp_length += len(hyp)
        ref_length += len(ref)
        for n in range(1, MAX_ORDER + 1):
            stats = modified_ngram_stats(hyp, ref, n)
            clipped[n - 1] += stats.clipped_matches
            totals[n - 1] += stats.candidate_total
    precisions = tuple(
        (clipped[i] / totals[i]) if totals[i] > 0 else 0.0 for i in range(MAX_ORDER)
    )
    bp = brevity_penalty(hyp_length, ref_length) if ref_length > 0 else 0.0
    if any(p == 0.0 for p in precisions):
        return BleuScore(0.0, precisions, bp, hyp_length, ref_length, zero_precision=True)
    score = bp * math.exp(sum(math.log(p) for p in precisions) / MAX_ORDER)
    return BleuScore(score, precisions, bp, hyp_length, ref_length)


def mean_sentence_bleu(hypotheses: Sequence[TokenSeq], references: Sequence[TokenSeq],
                       smooth_eps: float = 0.1) -> float:
    """Arithmetic mean of per-sentence BLEU, smoothing zero match counts by eps.

    Sensitivity-analysis variant only; corpus_bleu is the reported metric.
    Orders with no candidates (hypotheses shorter than n) are skipped.
    """
    if len(hypotheses) != len(references):
        raise LengthMismatch(len(hypotheses), len(references))
    if not hypotheses:
        raise ValueError("cannot score an empty corpus")
    scores = []
    for hyp, ref in zip(hypotheses, references):
        if len(hyp) == 0 or len(ref) == 0:
            scores.append(0.0)
            continue
        log_sum = 0.0
        orders = 0
        for n in range(1, MAX_ORDER + 1):
            stats = modified_ngram_stats(hyp, ref, n)
            if stats.candidate_total == 0:
                continue
            matches = stats.clipped_matches if stats.clipped_matches > 0 else smooth_eps
            log_sum += math.log(matches / stats.candidate_total)
            orders += 1
        if orders == 0:
            scores.append(0.0)
            continue
        scores.append(brevity_penalty(len(hyp), len(ref)) * math.exp(log_sum / orders))
    return sum(scores) / len(scores)
