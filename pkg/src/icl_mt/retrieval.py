"""TF-IDF index over the demonstration pool and top-K cosine retrieval.

The index is built once over the source side of the pool. The default
`corpus-fit` retrieval mode vectorizes the query with the prebuilt model and
costs O(query); `refit` mode refits the model on pool-plus-query before
scoring, which shifts every IDF by one document and costs O(pool) per call.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .corpus import LangPair, ParallelCorpus, SentencePair
from .tfidf import EmptyCollection, SparseVector, TfidfModel, fit_tfidf, vectorize
from .tokenization import tokenize

MODES = ("corpus-fit", "refit")
INDEX_FORMAT_VERSION = 1


@dataclass(frozen=True)
class ScoredPair:
    """One retrieved demonstration with its cosine score and pool index."""

    pair: SentencePair
    score: float
    pair_index: int


def cosine_similarity(a: SparseVector, b: SparseVector) -> float:
    """Cosine of two sparse vectors; 0.0 when either has zero norm."""
    norm_a = a.norm()
    norm_b = b.norm()
    if norm_a == 0.0 or norm_b == 0.0:
        return 0.0
    # rounding can push an exact self-match a few ulp above 1
    return min(1.0, a.dot(b) / (norm_a * norm_b))


@dataclass(frozen=True)
class RetrievalIndex:
    """Precomputed TF-IDF vectors and norms over the pool's source sentences."""

    model: TfidfModel
    doc_vectors: tuple[SparseVector, ...]
    doc_norms: tuple[float, ...]
    pairs: ParallelCorpus
    lang: str
    _postings: dict[int, list[int]] = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if not (len(self.doc_vectors) == len(self.doc_norms) == len(self.pairs)):
            raise ValueError("doc_vectors, doc_norms, and pairs must be aligned")
        if not self._postings:
            for doc_id, vec in enumerate(self.doc_vectors):
                for term_index in vec.entries:
                    self._postings.setdefault(term_index, []).append(doc_id)

    def __len__(self) -> int:
        return len(self.doc_vectors)


def build_index(dselect: ParallelCorpus, lang: str) -> RetrievalIndex:
    """Fit the TF-IDF model on the pool's source side and cache vectors and norms."""
    if len(dselect) == 0:
        raise EmptyCollection("empty demonstration pool")
    docs = [tokenize(pair.source_text, lang) for pair in dselect.pairs]
    model = fit_tfidf(docs)
    vectors = tuple(vectorize(model, doc) for doc in docs)
    norms = tuple(vec.norm() for vec in vectors)
    return RetrievalIndex(model, vectors, norms, dselect, lang)


def retrieve_top_k(index: RetrievalIndex, prompt: str, k: int,
                   mode: str = "corpus-fit") -> list[ScoredPair]:
    """Top-k pool pairs by cosine similarity to `prompt`, best first.

    Ties break on ascending pool index. A prompt whose vector has zero norm
    (empty, all out-of-vocabulary, or all zero-idf) scores every pair 0.0 and
    yields the first min(k, pool) pairs so the caller still gets K
    demonstrations.
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    if mode not in MODES:
        raise ValueError(f"unknown retrieval mode {mode!r}: expected one of {MODES}")
    if mode == "corpus-fit":
        query = vectorize(index.model, tokenize(prompt, index.lang))
        return rank_vector(index, query, k)
    # refit: the prompt joins the collection, so every IDF is refitted
    docs = [tokenize(pair.source_text, index.lang) for pair in index.pairs.pairs]
    query_doc = tokenize(prompt, index.lang)
    model = fit_tfidf(docs + [query_doc])
    vectors = [vectorize(model, doc) for doc in docs]
    norms = [vec.norm() for vec in vectors]
    query = vectorize(model, query_doc)
    return _rank(query, vectors, norms, index.pairs, k, postings=None)


def rank_vector(index: RetrievalIndex, query: SparseVector, k: int) -> list[ScoredPair]:
    """Rank the prebuilt index against an already-vectorized query."""
    return _rank(query, index.doc_vectors, index.doc_norms, index.pairs, k,
                 postings=index._postings)


def _rank(query, doc_vectors, doc_norms, pairs, k, postings):
    n = len(doc_vectors)
    limit = min(k, n)
    if limit == 0:
        return []
    query_norm = query.norm()
    if query_norm == 0.0:
        return [ScoredPair(pairs.pairs[i], 0.0, i) for i in range(limit)]
    if postings is None:
        candidates = range(n)
    else:
        hit = set()
        for term_index in query.entries:
            hit.update(postings.get(term_index, ()))
        candidates = sorted(hit)
    scored = []
    for i in candidates:
        doc_norm = doc_norms[i]
        if doc_norm == 0.0:
            continue
        score = query.dot(doc_vectors[i]) / (query_norm * doc_norm)
        if score > 0.0:
            scored.append((min(1.0, score), i))
    scored.sort(key=lambda item: (-item[0], item[1]))
    result = [ScoredPair(pairs.pairs[i], score, i) for score, i in scored[:limit]]
    if len(result) < limit:
        taken = {sp.pair_index for sp in result}
        for i in range(n):
            if len(result) == limit:
                break
            if i not in taken:
                result.append(ScoredPair(pairs.pairs[i], 0.0, i))
    return result


def save_index(index: RetrievalIndex, path: str | Path) -> None:
    """Persist an index as versioned JSON; weights round-trip bit-exactly."""
    doc = {
        "version": INDEX_FORMAT_VERSION,
        "lang": index.lang,
        "lang_pair": [index.pairs.lang_pair.source, index.pairs.lang_pair.target],
        "model": index.model.to_dict(),
        "doc_vectors": [
            [[i, w] for i, w in sorted(vec.entries.items())] for vec in index.doc_vectors
        ],
        "doc_norms": list(index.doc_norms),
        "pairs": [[p.source_text, p.target_text] for p in index.pairs.pairs],
    }
    with open(path, "w", encoding="utf-8") as f:
        json.dump(doc, f, ensure_ascii=False)


def load_index(path: str | Path) -> RetrievalIndex:
    with open(path, encoding="utf-8") as f:
        doc = json.load(f)
    if doc.get("version") != INDEX_FORMAT_VERSION:
        raise ValueError(f"unsupported index version {doc.get('version')!r}")
    model = TfidfModel.from_dict(doc["model"])
    dim = model.vocab_size
    vectors = tuple(
        SparseVector({int(i): float(w) for i, w in entries}, dim)
        for entries in doc["doc_vectors"]
    )
    lang_pair = LangPair(doc["lang_pair"][0], doc["lang_pair"][1])
    pairs = ParallelCorpus(lang_pair, tuple(
        SentencePair(src, tgt, i) for i, (src, tgt) in enumerate(doc["pairs"])
    ))
    return RetrievalIndex(model, vectors, tuple(doc["doc_norms"]), pairs, doc["lang"])
