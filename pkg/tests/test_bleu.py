import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from icl_mt.bleu import (LengthMismatch, brevity_penalty, corpus_bleu,
                         mean_sentence_bleu, modified_ngram_stats)
from icl_mt.tokenization import TokenSeq

from oracles import reference_corpus_bleu


def seq(tokens):
    return TokenSeq(tuple(tokens), "en")


class TestNgramStats:
    def test_classic_clipping_case(self):
        # seven 'the' against a reference containing two: clipped 2 of 7
        hyp = seq(["the"] * 7)
        ref = seq(["the", "cat", "is", "on", "the", "mat"])
        stats = modified_ngram_stats(hyp, ref, 1)
        assert stats.clipped_matches == 2
        assert stats.candidate_total == 7

    def test_identity(self):
        tokens = ["a", "b", "c", "d", "e"]
        for n in range(1, 5):
            stats = modified_ngram_stats(seq(tokens), seq(tokens), n)
            assert stats.clipped_matches == stats.candidate_total == len(tokens) - n + 1

    def test_hypothesis_shorter_than_n(self):
        stats = modified_ngram_stats(seq(["a", "b"]), seq(["a", "b", "c"]), 3)
        assert stats.candidate_total == 0
        assert stats.clipped_matches == 0

    def test_monotone_in_reference_counts(self):
        hyp = seq(["x", "x", "x"])
        low = modified_ngram_stats(hyp, seq(["x", "y"]), 1).clipped_matches
        high = modified_ngram_stats(hyp, seq(["x", "x", "y"]), 1).clipped_matches
        assert high >= low

    def test_bad_order(self):
        with pytest.raises(ValueError):
            modified_ngram_stats(seq(["a"]), seq(["a"]), 0)


class TestBrevityPenalty:
    def test_equal_lengths(self):
        assert brevity_penalty(10, 10) == 1.0

    def test_longer_hypothesis(self):
        assert brevity_penalty(12, 10) == 1.0

    def test_half_length(self):
        assert brevity_penalty(5, 10) == pytest.approx(math.exp(-1), abs=1e-12)
        assert brevity_penalty(5, 10) == pytest.approx(0.367879, abs=1e-6)

    def test_empty_hypothesis(self):
        assert brevity_penalty(0, 10) == 0.0

    def test_zero_reference_rejected(self):
        with pytest.raises(ValueError):
            brevity_penalty(3, 0)


def random_corpus(rng, n_segments, vocab, min_len=4, max_len12=12):
    hyps, refs = [], []
    for _ in range(n_segments):
        ref = [rng.choice(vocab) for _ in range(rng.randint(min_len, max_len12))]
        # hypothesis shares most of the reference so 4-gram matches exist
        hyp = list(ref)
        for _ in range(rng.randint(0, 2)):
            hyp[rng.randrange(len(hyp))] = rng.choice(vocab)
        if rng.random() < 0.3:
            hyp = hyp[:-1] or hyp
        hyps.append(hyp)
        refs.append(ref)
    return hyps, refs


class TestCorpusBleu:
    def test_identity_scores_one(self):
        docs = [seq(["the", "cat", "sat", "on", "the", "mat"]),
                seq(["a", "very", "good", "translation", "indeed"])]
        result = corpus_bleu(docs, docs)
        assert result.score == 1.0
        assert result.precisions == (1.0, 1.0, 1.0, 1.0)
        assert result.brevity_penalty == 1.0

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            corpus_bleu([seq(["a"])], [])

    def test_empty_corpus(self):
        with pytest.raises(ValueError):
            corpus_bleu([], [])

    def test_zero_precision_flag(self):
        result = corpus_bleu([seq(["x", "y"])], [seq(["a", "b"])])
        assert result.score == 0.0
        assert result.zero_precision
        assert not math.isnan(result.score)

    def test_short_hypotheses_zero_total(self):
        # no 4-gram candidates at all
        result = corpus_bleu([seq(["a", "b"])], [seq(["a", "b"])])
        assert result.score == 0.0
        assert result.zero_precision

    def test_score_decomposition_invariant(self):
        rng = random.Random(1)
        hyps, refs = random_corpus(rng, 20, [f"w{i}" for i in range(30)])
        result = corpus_bleu([seq(h) for h in hyps], [seq(r) for r in refs])
        if not result.zero_precision:
            recomputed = result.brevity_penalty * math.exp(
                sum(math.log(p) for p in result.precisions) / 4)
            assert abs(result.score - recomputed) <= 1e-12

    def test_permutation_invariance(self):
        rng = random.Random(7)
        hyps, refs = random_corpus(rng, 15, [f"w{i}" for i in range(20)])
        base = corpus_bleu([seq(h) for h in hyps], [seq(r) for r in refs]).score
        for trial in range(20):
            order = list(range(len(hyps)))
            random.Random(trial).shuffle(order)
            shuffled = corpus_bleu([seq(hyps[i]) for i in order],
                                   [seq(refs[i]) for i in order]).score
            assert shuffled == base

    def test_oracle_cross_check_100_corpora(self):
        rng = random.Random(42)
        vocab = [f"w{i}" for i in range(25)]
        for _ in range(100):
            hyps, refs = random_corpus(rng, rng.randint(1, 12), vocab)
            got = corpus_bleu([seq(h) for h in hyps], [seq(r) for r in refs])
            expected = reference_corpus_bleu(hyps, refs)
            assert abs(got.score - expected) <= 1e-9

    def test_oracle_agrees_on_clipping_case(self):
        hyps = [["the"] * 7]
        refs = [["the", "cat", "is", "on", "the", "mat"]]
        got = corpus_bleu([seq(h) for h in hyps], [seq(r) for r in refs])
        assert got.precisions[0] == pytest.approx(2 / 7, abs=1e-15)
        assert got.score == reference_corpus_bleu(hyps, refs) == 0.0

    @given(st.lists(st.lists(st.sampled_from("abcdef"), min_size=5, max_size=10),
                    min_size=1, max_size=6))
    @settings(max_examples=50, deadline=None)
    def test_score_bounds(self, token_lists):
        docs = [seq(t) for t in token_lists]
        result = corpus_bleu(docs, docs)
        assert result.score == 1.0  # identity always scores 1
        other = corpus_bleu(docs, [seq(list(reversed(t))) for t in token_lists])
        assert 0.0 <= other.score <= 1.0


class TestMeanSentenceBleu:
    def test_identity(self):
        docs = [seq(["a", "b", "c", "d", "e"])]
        assert mean_sentence_bleu(docs, docs) == pytest.approx(1.0, abs=1e-12)

    def test_smoothing_keeps_score_positive(self):
        score = mean_sentence_bleu([seq(["a", "b", "c", "d", "x"])],
                                   [seq(["a", "b", "c", "d", "e"])])
        assert 0.0 < score < 1.0

    def test_mismatch(self):
        with pytest.raises(LengthMismatch):
            mean_sentence_bleu([seq(["a"])], [])
