"""TF-IDF model fitting and sparse document vectors.

TF is the raw count of a term over the document's token count. IDF is the
natural log of corpus size over document frequency, with no smoothing: the
vocabulary is built from the corpus itself, so document frequency is always at
least 1. A document's weight for a term is tf * idf; zero-idf terms (those in
every document) are dropped from vectors since they cannot move a cosine.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

from .tokenization import TokenSeq


class EmptyDocument(ValueError):
    """Term frequency is undefined for a document with no tokens."""


class EmptyCollection(ValueError):
    """Fitting needs at least one document with at least one token."""


@dataclass(frozen=True)
class TfidfModel:
    """Vocabulary, document frequencies, and IDF weights of a fitted collection.

    vocabulary maps each term to a dense index 0..V-1 in first-occurrence
    order; doc_freq and idf are aligned with those indices.
    """

    vocabulary: dict[str, int]
    doc_freq: tuple[int, ...]
    num_docs: int
    idf: tuple[float, ...]

    @property
    def vocab_size(self) -> int:
        return len(self.vocabulary)

    def to_dict(self) -> dict:
        """JSON-safe form; idf is recomputed on load and round-trips bit-exactly."""
        terms = [""] * len(self.vocabulary)
        for term, i in self.vocabulary.items():
            terms[i] = term
        return {
            "version": 1,
            "terms": terms,
            "doc_freq": list(self.doc_freq),
            "num_docs": self.num_docs,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TfidfModel":
        if data.get("version") != 1:
            raise ValueError(f"unsupported model version {data.get('version')!r}")
        terms = data["terms"]
        doc_freq = tuple(data["doc_freq"])
        num_docs = data["num_docs"]
        idf = tuple(math.log(num_docs / df) for df in doc_freq)
        return cls({t: i for i, t in enumerate(terms)}, doc_freq, num_docs, idf)


@dataclass(frozen=True)
class SparseVector:
    """One TF-IDF row: term index -> positive weight, plus the vocabulary size."""

    entries: dict[int, float]
    dim: int

    def norm(self) -> float:
        # summed in ascending index order so recomputation is bit-stable
        return math.sqrt(sum(w * w for _, w in sorted(self.entries.items())))

    def dot(self, other: "SparseVector") -> float:
        a, b = self.entries, other.entries
        if len(b) < len(a):
            a, b = b, a
        return sum(a[i] * b[i] for i in sorted(a) if i in b)


def tf(term: str, doc: TokenSeq) -> float:
    """Occurrences of `term` in `doc` over the document's token count."""
    if len(doc) == 0:
        raise EmptyDocument("term frequency over an empty document")
    return doc.tokens.count(term) / len(doc)


def fit_tfidf(docs: Sequence[TokenSeq]) -> TfidfModel:
    """Fit vocabulary, document frequencies, and IDF over a document collection."""
    if not docs:
        raise EmptyCollection("no documents to fit")
    vocabulary: dict[str, int] = {}
    for doc in docs:
        for term in doc.tokens:
            if term not in vocabulary:
                vocabulary[term] = len(vocabulary)
    if not vocabulary:
        raise EmptyCollection("every document is empty")
    doc_freq = [0] * len(vocabulary)
    for doc in docs:
        for index in sorted({vocabulary[t] for t in doc.tokens}):
            doc_freq[index] += 1
    num_docs = len(docs)
    idf = tuple(math.log(num_docs / df) for df in doc_freq)
    return TfidfModel(vocabulary, tuple(doc_freq), num_docs, idf)


def idf(term: str, model: TfidfModel) -> float:
    """IDF of `term` under `model`; out-of-vocabulary terms carry no weight."""
    index = model.vocabulary.get(term)
    if index is None:
        return 0.0
    return model.idf[index]


def vectorize(model: TfidfModel, doc: TokenSeq) -> SparseVector:
    """TF-IDF vector of `doc` under `model`.

    Out-of-vocabulary and zero-idf terms produce no entry; an empty or
    entirely out-of-vocabulary document yields an empty vector.
    """
    if len(doc) == 0:
        return SparseVector({}, model.vocab_size)
    counts = Counter(doc.tokens)
    indexed = sorted(
        (model.vocabulary[term], count)
        for term, count in counts.items()
        if term in model.vocabulary
    )
    n = len(doc)
    entries = {}
    for index, count in indexed:
        weight = (count / n) * model.idf[index]
        if weight > 0.0:
            entries[index] = weight
    return SparseVector(entries, model.vocab_size)
