"""Language-aware tokenization shared by the TF-IDF model and BLEU.

Whitespace-delimited languages are lowercased, split on Unicode whitespace,
and stripped of leading/trailing punctuation. Chinese and Japanese, which have
no whitespace word boundaries, are tokenized into overlapping character
bigrams over each punctuation-free run; no external segmenter is used.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass

BIGRAM_LANGS = frozenset({"zh", "ja"})


@dataclass(frozen=True)
class TokenSeq:
    """An ordered token sequence tagged with its language code."""

    tokens: tuple[str, ...]
    lang: str

    def __post_init__(self):
        if any(not t for t in self.tokens):
            raise ValueError("TokenSeq with empty token")

    def __len__(self) -> int:
        return len(self.tokens)

    def __iter__(self):
        return iter(self.tokens)

    def __getitem__(self, item):
        return self.tokens[item]


def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P")


def _strip_punct(token: str) -> str:
    start, end = 0, len(token)
    while start < end and _is_punct(token[start]):
        start += 1
    while end > start and _is_punct(token[end - 1]):
        end -= 1
    return token[start:end]


def _char_runs(text: str) -> list[str]:
    """Maximal runs of characters that are neither whitespace nor punctuation."""
    runs, current = [], []
    for ch in text:
        if ch.isspace() or _is_punct(ch):
            if current:
                runs.append("".join(current))
                current = []
        else:
            current.append(ch)
    if current:
        runs.append("".join(current))
    return runs


def tokenize(text: str, lang: str) -> TokenSeq:
    """Tokenize `text` for language `lang`. Empty input yields an empty sequence."""
    lowered = text.lower()
    tokens: list[str] = []
    if lang in BIGRAM_LANGS:
        for run in _char_runs(lowered):
            if len(run) == 1:
                tokens.append(run)
            else:
                tokens.extend(run[i:i + 2] for i in range(len(run) - 1))
    else:
        for raw in lowered.split():
            token = _strip_punct(raw)
            if token:
                tokens.append(token)
    return TokenSeq(tuple(tokens), lang)
