"""In-context demonstration retrieval and evaluation toolkit for LLM translation.

Pipeline: load a parallel demonstration pool, index its source side with
TF-IDF, retrieve the top-K most cosine-similar pairs for each input sentence,
assemble a few-shot chat prompt, send it to a chat-completions backend, and
score the output with BLEU (native) and COMET (external scorer service).
"""

from .bleu import BleuScore, brevity_penalty, corpus_bleu, modified_ngram_stats
from .comet import CometRecord, CometResult, comet_scores
from .corpus import (LangPair, ParallelCorpus, SentencePair, load_parallel_corpus,
                     load_tsv_corpus, split_dataset)
from .experiment import ExperimentConfig, ExperimentReport, ScenarioResult, run_experiment, run_scenario, run_size_ablation
from .llm import BackendConfig, CompletionResult, HttpChatBackend, MockChatBackend, complete_chat
from .prompting import ChatMessage, Scenario, build_messages, format_examples, select_random_examples
from .retrieval import RetrievalIndex, ScoredPair, build_index, cosine_similarity, retrieve_top_k
from .tfidf import SparseVector, TfidfModel, fit_tfidf, idf, tf, vectorize
from .tokenization import TokenSeq, tokenize

__version__ = "0.1.0"

__all__ = [
    "BackendConfig", "BleuScore", "ChatMessage", "CometRecord", "CometResult",
    "CompletionResult", "ExperimentConfig", "ExperimentReport", "HttpChatBackend",
    "LangPair", "MockChatBackend", "ParallelCorpus", "RetrievalIndex", "Scenario",
    "ScenarioResult", "ScoredPair", "SentencePair", "SparseVector", "TfidfModel",
    "TokenSeq", "brevity_penalty", "build_index", "build_messages", "comet_scores",
    "complete_chat", "corpus_bleu", "cosine_similarity", "fit_tfidf",
    "format_examples", "idf", "load_parallel_corpus", "load_tsv_corpus",
    "modified_ngram_stats", "retrieve_top_k", "run_experiment", "run_scenario",
    "run_size_ablation", "select_random_examples", "split_dataset", "tf",
    "tokenize", "vectorize",
]
