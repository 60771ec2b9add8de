"""Chat prompt assembly for the three translation scenarios.

A prompt is always exactly two messages: a system message carrying the
translation rules (and, in few-shot scenarios, the demonstration blocks) and a
user message carrying the sentence to translate. Demonstrations are ordered
most-similar-first for retrieval and in selection order for random sampling.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

from .corpus import LangPair, ParallelCorpus, SentencePair
from .sampling import sample_indices

SCENARIO_KINDS = ("zero_shot", "random_k", "retrieve_k")

# Display names used inside prompts; extend for new corpora.
LANGUAGE_NAMES = {
    "zh": "Chinese",
    "ja": "Japanese",
    "vi": "Vietnamese",
    "en": "English",
}


class KExceedsPool(ValueError):
    def __init__(self, k: int, pool: int):
        super().__init__(f"cannot select {k} examples from a pool of {pool}")
        self.k = k
        self.pool = pool


def language_name(code: str) -> str:
    """Display name for a language code; unknown codes fall back to uppercase."""
    return LANGUAGE_NAMES.get(code, code.upper())


@dataclass(frozen=True)
class ChatMessage:
    role: str
    content: str

    def __post_init__(self):
        if self.role not in ("system", "user"):
            raise ValueError(f"unsupported role {self.role!r}")
        if not self.content:
            raise ValueError("empty message content")


@dataclass(frozen=True)
class Scenario:
    """One experimental condition: no examples, random examples, or retrieved ones."""

    kind: str
    k: int = 0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in SCENARIO_KINDS:
            raise ValueError(f"unknown scenario kind {self.kind!r}")
        if self.kind == "zero_shot" and self.k != 0:
            raise ValueError("zero_shot scenario must have k == 0")
        if self.k < 0:
            raise ValueError("k must be nonnegative")


def format_examples(pairs: Sequence[SentencePair], lang_pair: LangPair) -> str:
    """Render demonstration pairs as language-labelled blocks.

    Each block is `<SourceName>: <source>\\n<TargetName>: <target>\\n`; blocks
    are separated by a single blank line. Empty input renders to "".
    """
    src_name = language_name(lang_pair.source)
    tgt_name = language_name(lang_pair.target)
    blocks = [
        f"{src_name}: {pair.source_text}\n{tgt_name}: {pair.target_text}\n"
        for pair in pairs
    ]
    return "\n".join(blocks)


def select_random_examples(dselect: ParallelCorpus, k: int, seed: int) -> list[SentencePair]:
    """k distinct pairs drawn uniformly without replacement, determined by seed."""
    if k > len(dselect):
        raise KExceedsPool(k, len(dselect))
    return [dselect.pairs[i] for i in sample_indices(len(dselect), k, seed)]


def build_messages(scenario: Scenario, src_text: str,
                   examples: Sequence[SentencePair], lang_pair: LangPair) -> list[ChatMessage]:
    """Assemble the two-message chat prompt for one source sentence."""
    if scenario.kind == "zero_shot" and examples:
        raise ValueError("zero_shot scenario must not carry examples")
    src_name = language_name(lang_pair.source)
    tgt_name = language_name(lang_pair.target)
    system = (
        f"You are a translation assistant from {src_name} to {tgt_name}. "
        "Some rules to remember:\n\n"
        "- Do not add extra blank lines.\n"
        "- It is important to maintain the accuracy of the contents, but we "
        "don't want the output to read like it's been translated. So instead "
        "of translating word by word, prioritize naturalness and ease of "
        "communication."
    )
    if examples:
        system += (
            f"\n\n Here are some examples that you can use to learn how to "
            f"translate from {src_name} to {tgt_name}:\n"
            + format_examples(examples, lang_pair)
        )
    user = (
        f" Please translate the given {src_name} sentence {src_text} to "
        f"{tgt_name} sentence and please make the translation as accurate "
        "and natural as possible."
    )
    return [ChatMessage("system", system), ChatMessage("user", user)]


def messages_to_json(messages: Sequence[ChatMessage]) -> str:
    """Serialize a message sequence for prompt audits."""
    return json.dumps(
        [{"role": m.role, "content": m.content} for m in messages],
        ensure_ascii=False, indent=2,
    )
