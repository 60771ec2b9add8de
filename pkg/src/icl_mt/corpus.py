"""Parallel corpus loading, validation, and pool/test splitting."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

from .sampling import sample_indices

_LANG_CODE = re.compile(r"^[a-z]{2,3}$")


class CorpusError(Exception):
    """Base class for corpus loading and splitting failures."""


class LineCountMismatch(CorpusError):
    """Source and target files have different line counts."""

    def __init__(self, src_lines: int, tgt_lines: int):
        super().__init__(f"line count mismatch: source has {src_lines} lines, target has {tgt_lines}")
        self.src_lines = src_lines
        self.tgt_lines = tgt_lines


class InvalidUtf8(CorpusError):
    """A line could not be decoded as UTF-8. line_no is 1-based."""

    def __init__(self, path: str, line_no: int):
        super().__init__(f"{path}: line {line_no} is not valid UTF-8")
        self.path = path
        self.line_no = line_no


class EmptySegment(CorpusError):
    """A line is empty on the source or target side. line_no is 1-based."""

    def __init__(self, line_no: int):
        super().__init__(f"empty segment at line {line_no}")
        self.line_no = line_no


class MalformedLine(CorpusError):
    """A TSV line does not contain exactly one tab. line_no is 1-based."""

    def __init__(self, line_no: int):
        super().__init__(f"malformed line {line_no}: expected exactly one tab")
        self.line_no = line_no


class SizeExceedsCorpus(CorpusError):
    def __init__(self, requested: int, available: int):
        super().__init__(f"requested {requested} pairs but only {available} available")
        self.requested = requested
        self.available = available


@dataclass(frozen=True)
class LangPair:
    """A translation direction, e.g. zh -> en. Codes are lowercase ISO 639."""

    source: str
    target: str

    def __post_init__(self):
        for code in (self.source, self.target):
            if not _LANG_CODE.match(code):
                raise ValueError(f"bad language code {code!r}: expected lowercase [a-z]{{2,3}}")
        if self.source == self.target:
            raise ValueError(f"source and target language are both {self.source!r}")

    @classmethod
    def from_string(cls, tag: str) -> "LangPair":
        """Parse a 'src-tgt' tag such as 'zh-en'."""
        parts = tag.lower().split("-")
        if len(parts) != 2:
            raise ValueError(f"bad language pair tag {tag!r}: expected 'src-tgt'")
        return cls(parts[0], parts[1])

    @property
    def tag(self) -> str:
        return f"{self.source}-{self.target}"

    @property
    def label(self) -> str:
        """Uppercase display form, e.g. 'ZH-EN'."""
        return self.tag.upper()


@dataclass(frozen=True)
class SentencePair:
    """One aligned sentence pair; index is its 0-based position in the corpus."""

    source_text: str
    target_text: str
    index: int

    def __post_init__(self):
        for text in (self.source_text, self.target_text):
            if not text:
                raise ValueError("sentence pair with empty side")
            if "\n" in text:
                raise ValueError("sentence pair with embedded newline")


@dataclass(frozen=True)
class ParallelCorpus:
    lang_pair: LangPair
    pairs: tuple[SentencePair, ...] = field(default_factory=tuple)

    def __post_init__(self):
        for position, pair in enumerate(self.pairs):
            if pair.index != position:
                raise ValueError(f"pair at position {position} carries index {pair.index}")

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    def prefix(self, size: int) -> "ParallelCorpus":
        """First `size` pairs as a new corpus."""
        if size > len(self.pairs):
            raise SizeExceedsCorpus(size, len(self.pairs))
        return ParallelCorpus(self.lang_pair, self.pairs[:size])


def _read_lines(path: str | Path) -> list[str]:
    """Read UTF-8 lines without their terminating newline, byte-faithful otherwise."""
    raw = Path(path).read_bytes()
    chunks = raw.split(b"\n")
    if chunks and chunks[-1] == b"":
        chunks.pop()  # trailing newline, not an extra empty line
    lines = []
    for line_no, chunk in enumerate(chunks, start=1):
        try:
            lines.append(chunk.decode("utf-8"))
        except UnicodeDecodeError:
            raise InvalidUtf8(str(path), line_no) from None
    return lines


def load_parallel_corpus(source_path: str | Path, target_path: str | Path,
                         lang_pair: LangPair) -> ParallelCorpus:
    """Load two line-aligned UTF-8 files into a corpus.

    Raises LineCountMismatch when the files disagree in length, EmptySegment
    when either side of a line is empty (rejected rather than skipped so
    indices stay aligned with the files), InvalidUtf8 on undecodable lines.
    """
    src_lines = _read_lines(source_path)
    tgt_lines = _read_lines(target_path)
    if len(src_lines) != len(tgt_lines):
        raise LineCountMismatch(len(src_lines), len(tgt_lines))
    pairs = []
    for i, (src, tgt) in enumerate(zip(src_lines, tgt_lines)):
        if not src or not tgt:
            raise EmptySegment(i + 1)
        pairs.append(SentencePair(src, tgt, i))
    return ParallelCorpus(lang_pair, tuple(pairs))


def load_tsv_corpus(path: str | Path, lang_pair: LangPair) -> ParallelCorpus:
    """Load a single-file corpus with one `source<TAB>target` record per line."""
    pairs = []
    for i, line in enumerate(_read_lines(path)):
        fields = line.split("\t")
        if len(fields) != 2:
            raise MalformedLine(i + 1)
        src, tgt = fields
        if not src or not tgt:
            raise EmptySegment(i + 1)
        pairs.append(SentencePair(src, tgt, i))
    return ParallelCorpus(lang_pair, tuple(pairs))


def write_parallel_corpus(corpus: ParallelCorpus, source_path: str | Path,
                          target_path: str | Path) -> None:
    """Write a corpus back to two line-aligned UTF-8 files."""
    with open(source_path, "w", encoding="utf-8") as src_f, \
            open(target_path, "w", encoding="utf-8") as tgt_f:
        for pair in corpus.pairs:
            src_f.write(pair.source_text + "\n")
            tgt_f.write(pair.target_text + "\n")


def split_dataset(corpus: ParallelCorpus, pool_size: int,
                  test_corpus: ParallelCorpus, test_size: int,
                  sample_seed: int | None = None) -> tuple[ParallelCorpus, ParallelCorpus]:
    """Carve the demonstration pool and the test set out of two corpora.

    The pool is the first `pool_size` pairs of `corpus` and the test set the
    first `test_size` pairs of `test_corpus`. With `sample_seed` set, the pool
    is instead a uniform sample without replacement (kept in corpus order and
    reindexed densely); the default prefix behavior is the documented one.
    """
    if pool_size > len(corpus):
        raise SizeExceedsCorpus(pool_size, len(corpus))
    if test_size > len(test_corpus):
        raise SizeExceedsCorpus(test_size, len(test_corpus))
    if sample_seed is None:
        pool = corpus.prefix(pool_size)
    else:
        chosen = sorted(sample_indices(len(corpus), pool_size, sample_seed))
        pairs = tuple(
            SentencePair(corpus.pairs[j].source_text, corpus.pairs[j].target_text, i)
            for i, j in enumerate(chosen)
        )
        pool = ParallelCorpus(corpus.lang_pair, pairs)
    return pool, test_corpus.prefix(test_size)
