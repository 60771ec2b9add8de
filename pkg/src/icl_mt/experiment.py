"""Experiment orchestration: scenarios x language pairs, plus the pool-size ablation.

Cells run sequentially. A cell that fails is recorded with its partial results
and the remaining cells still run; a sentence that fails aborts its cell but
keeps the sentences completed before it. With a mock backend and a fixed seed
the entire report is deterministic.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Mapping, Sequence

from .bleu import BleuScore, corpus_bleu
from .comet import CometRecord, ScorerUnavailable, comet_scores
from .corpus import (CorpusError, LangPair, ParallelCorpus, load_parallel_corpus,
                     load_tsv_corpus, split_dataset)
from .llm import LlmError, backend_from_config
from .prompting import Scenario, build_messages, select_random_examples
from .retrieval import build_index, retrieve_top_k
from .sampling import mix_seed
from .tokenization import tokenize

log = logging.getLogger(__name__)

SCENARIO_LABELS = {
    "zero_shot": "Without ICL",
    "random_k": "Random ICL",
    "retrieve_k": "Retrieve ICL",
}


@dataclass(frozen=True)
class CorpusPaths:
    """Where one language pair's corpora live: two aligned files or a TSV per split."""

    train_src: str | None = None
    train_tgt: str | None = None
    test_src: str | None = None
    test_tgt: str | None = None
    train_tsv: str | None = None
    test_tsv: str | None = None

    def load(self, lang_pair: LangPair) -> tuple[ParallelCorpus, ParallelCorpus]:
        if self.train_tsv:
            train = load_tsv_corpus(self.train_tsv, lang_pair)
        else:
            if not (self.train_src and self.train_tgt):
                raise ValueError(f"no training corpus configured for {lang_pair.tag}")
            train = load_parallel_corpus(self.train_src, self.train_tgt, lang_pair)
        if self.test_tsv:
            test = load_tsv_corpus(self.test_tsv, lang_pair)
        else:
            if not (self.test_src and self.test_tgt):
                raise ValueError(f"no test corpus configured for {lang_pair.tag}")
            test = load_parallel_corpus(self.test_src, self.test_tgt, lang_pair)
        return train, test


@dataclass
class ExperimentConfig:
    lang_pairs: list[LangPair]
    scenarios: list[Scenario]
    data: dict[str, CorpusPaths]
    backend: dict
    k: int = 4
    pool_size: int = 10000
    test_size: int = 100
    retrieval_mode: str = "corpus-fit"
    scorer: str | None = None
    seed: int = 0
    output_path: str | None = None
    pool_sample_seed: int | None = None

    def __post_init__(self):
        if self.test_size < 1:
            raise ValueError("test_size must be at least 1")
        if self.k < 0:
            raise ValueError("k must be nonnegative")

    @classmethod
    def from_dict(cls, raw: Mapping) -> "ExperimentConfig":
        lang_pairs = [LangPair.from_string(tag) for tag in raw["lang_pairs"]]
        k = int(raw.get("k", 4))
        seed = int(raw.get("seed", 0))
        scenarios = [
            _parse_scenario(entry, default_k=k, default_seed=seed)
            for entry in raw.get("scenarios", list(SCENARIO_LABELS))
        ]
        data = {
            tag: CorpusPaths(**paths) for tag, paths in raw.get("data", {}).items()
        }
        return cls(
            lang_pairs=lang_pairs,
            scenarios=scenarios,
            data=data,
            backend=dict(raw.get("backend", {"kind": "mock"})),
            k=k,
            pool_size=int(raw.get("pool_size", 10000)),
            test_size=int(raw.get("test_size", 100)),
            retrieval_mode=raw.get("retrieval_mode", "corpus-fit"),
            scorer=raw.get("scorer"),
            seed=seed,
            output_path=raw.get("output_path"),
            pool_sample_seed=raw.get("pool_sample_seed"),
        )

    @classmethod
    def from_file(cls, path: str | Path) -> "ExperimentConfig":
        with open(path, encoding="utf-8") as f:
            return cls.from_dict(json.load(f))

    def snapshot(self) -> dict:
        """Config as recorded in reports, with any secret redacted."""
        backend = dict(self.backend)
        if backend.get("api_key"):
            backend["api_key"] = "***"
        return {
            "lang_pairs": [lp.tag for lp in self.lang_pairs],
            "scenarios": [
                {"kind": s.kind, "k": s.k, "seed": s.seed} for s in self.scenarios
            ],
            "data": {tag: {k: v for k, v in vars(paths).items() if v}
                     for tag, paths in self.data.items()},
            "backend": backend,
            "k": self.k,
            "pool_size": self.pool_size,
            "test_size": self.test_size,
            "retrieval_mode": self.retrieval_mode,
            "scorer": self.scorer,
            "seed": self.seed,
            "output_path": self.output_path,
            "pool_sample_seed": self.pool_sample_seed,
        }


def _parse_scenario(entry, default_k: int, default_seed: int) -> Scenario:
    if isinstance(entry, str):
        kind = entry
        k = 0 if kind == "zero_shot" else default_k
        return Scenario(kind, k, default_seed)
    return Scenario(
        entry["kind"],
        int(entry.get("k", 0 if entry["kind"] == "zero_shot" else default_k)),
        int(entry.get("seed", default_seed)),
    )


@dataclass(frozen=True)
class ScenarioResult:
    lang_pair: LangPair
    scenario: Scenario
    label: str
    bleu: BleuScore
    comet_mean: float | None
    comet_checkpoint: str | None
    comet_error: str | None
    per_sentence: list[dict]

    def to_dict(self) -> dict:
        return {
            "lang_pair": self.lang_pair.tag,
            "scenario": {"kind": self.scenario.kind, "k": self.scenario.k,
                         "seed": self.scenario.seed},
            "label": self.label,
            "bleu": {
                "score": self.bleu.score,
                "precisions": list(self.bleu.precisions),
                "brevity_penalty": self.bleu.brevity_penalty,
                "hyp_length": self.bleu.hyp_length,
                "ref_length": self.bleu.ref_length,
                "zero_precision": self.bleu.zero_precision,
            },
            "comet_mean": self.comet_mean,
            "comet_checkpoint": self.comet_checkpoint,
            "comet_error": self.comet_error,
            "per_sentence": self.per_sentence,
        }


class ScenarioError(Exception):
    """A cell aborted at some sentence; completed sentences are preserved."""

    def __init__(self, lang_pair: LangPair, label: str, sentence_index: int,
                 cause: Exception, partial: list[dict]):
        super().__init__(
            f"{lang_pair.tag} / {label} failed at sentence {sentence_index}: {cause}")
        self.lang_pair = lang_pair
        self.label = label
        self.sentence_index = sentence_index
        self.cause = cause
        self.partial = partial


@dataclass
class ExperimentReport:
    config: dict
    results: list[ScenarioResult] = field(default_factory=list)
    failures: list[dict] = field(default_factory=list)
    backend_model: str = ""
    started_at: str = ""
    finished_at: str = ""

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "results": [r.to_dict() for r in self.results],
            "failures": self.failures,
            "backend_model": self.backend_model,
            "timestamps": {"started_at": self.started_at, "finished_at": self.finished_at},
        }

    def render_table(self) -> str:
        """Plain-text table with one row per scenario under each language pair."""
        width = max([len("Evaluation Matrix")]
                    + [len(r.label) for r in self.results]
                    + [len(f["label"]) for f in self.failures])
        lines = [f"{'Evaluation Matrix':<{width}}  {'COMET':>8}  {'BLEU':>8}"]
        by_pair: dict[str, list] = {}
        for result in self.results:
            by_pair.setdefault(result.lang_pair.label, []).append(result)
        for failure in self.failures:
            by_pair.setdefault(failure["lang_pair"].upper(), []).append(failure)
        for pair_label, rows in by_pair.items():
            lines.append(pair_label)
            for row in rows:
                if isinstance(row, ScenarioResult):
                    comet = f"{row.comet_mean:.4f}" if row.comet_mean is not None else "-"
                    lines.append(f"{row.label:<{width}}  {comet:>8}  {row.bleu.score:>8.4f}")
                else:
                    lines.append(f"{row['label']:<{width}}  {'failed':>8}  {'-':>8}")
        return "\n".join(lines) + "\n"

    def write(self, base_path: str | Path) -> tuple[Path, Path]:
        """Write <base>.json and <base>.txt; returns both paths."""
        base = Path(base_path)
        base.parent.mkdir(parents=True, exist_ok=True)
        json_path = base.with_suffix(".json")
        txt_path = base.with_suffix(".txt")
        json_path.write_text(
            json.dumps(self.to_dict(), indent=2, sort_keys=True, ensure_ascii=False) + "\n",
            encoding="utf-8")
        txt_path.write_text(self.render_table(), encoding="utf-8")
        return json_path, txt_path


def _load_split(config: ExperimentConfig, lang_pair: LangPair,
                pool_size: int | None = None) -> tuple[ParallelCorpus, ParallelCorpus]:
    paths = config.data.get(lang_pair.tag)
    if paths is None:
        raise ValueError(f"no corpora configured for {lang_pair.tag}")
    train, test = paths.load(lang_pair)
    return split_dataset(train, pool_size if pool_size is not None else config.pool_size,
                         test, config.test_size, sample_seed=config.pool_sample_seed)


def run_scenario(config: ExperimentConfig, lang_pair: LangPair, scenario: Scenario, *,
                 backend=None, pool: ParallelCorpus | None = None,
                 test_set: ParallelCorpus | None = None, index=None,
                 label: str | None = None) -> ScenarioResult:
    """Translate the test set under one scenario and score the output.

    The pool, test set, backend, and retrieval index can be passed in to share
    them across cells; otherwise they are resolved from the config.
    """
    if pool is None or test_set is None:
        pool, test_set = _load_split(config, lang_pair)
    if backend is None:
        backend = backend_from_config(config.backend)
    if scenario.kind == "retrieve_k" and index is None:
        index = build_index(pool, lang_pair.source)
    label = label or SCENARIO_LABELS[scenario.kind]

    per_sentence: list[dict] = []
    for i, test_pair in enumerate(test_set.pairs):
        try:
            if scenario.kind == "zero_shot":
                examples, indices, scores = [], [], []
            elif scenario.kind == "random_k":
                # resampled per sentence, deterministically from the run seed
                examples = select_random_examples(
                    pool, scenario.k, mix_seed(scenario.seed, i))
                indices = [p.index for p in examples]
                scores = []
            else:
                ranked = retrieve_top_k(index, test_pair.source_text, scenario.k,
                                        config.retrieval_mode)
                examples = [sp.pair for sp in ranked]
                indices = [sp.pair_index for sp in ranked]
                scores = [sp.score for sp in ranked]
            messages = build_messages(scenario, test_pair.source_text, examples, lang_pair)
            completion = backend.complete_chat(messages)
        except (LlmError, CorpusError, ValueError) as exc:
            raise ScenarioError(lang_pair, label, i, exc, per_sentence) from exc
        per_sentence.append({
            "source": test_pair.source_text,
            "hypothesis": completion.text,
            "reference": test_pair.target_text,
            "retrieved_indices": indices,
            "scores": scores,
        })

    tgt = lang_pair.target
    bleu = corpus_bleu(
        [tokenize(r["hypothesis"], tgt) for r in per_sentence],
        [tokenize(r["reference"], tgt) for r in per_sentence],
    )
    comet_mean = comet_checkpoint = comet_error = None
    if config.scorer:
        try:
            records = [CometRecord(r["source"], r["hypothesis"], r["reference"])
                       for r in per_sentence]
            result = comet_scores(config.scorer, records)
            comet_mean, comet_checkpoint = result.mean, result.checkpoint
        except (ScorerUnavailable, ValueError) as exc:
            # BLEU-only degradation: the report still completes
            comet_error = str(exc)
            log.warning("COMET scoring skipped for %s/%s: %s", lang_pair.tag, label, exc)
    return ScenarioResult(lang_pair, scenario, label, bleu,
                          comet_mean, comet_checkpoint, comet_error, per_sentence)


def run_experiment(config: ExperimentConfig) -> ExperimentReport:
    """Run every (language pair x scenario) cell and write the report files."""
    report = ExperimentReport(config.snapshot(),
                              backend_model=config.backend.get("model_name", "mock"),
                              started_at=_now())
    backend = backend_from_config(config.backend)
    for lang_pair in config.lang_pairs:
        try:
            pool, test_set = _load_split(config, lang_pair)
        except (CorpusError, OSError, ValueError) as exc:
            for scenario in config.scenarios:
                report.failures.append(_failure(lang_pair, SCENARIO_LABELS[scenario.kind],
                                                None, exc, []))
            continue
        index = None
        for scenario in config.scenarios:
            try:
                if scenario.kind == "retrieve_k" and index is None:
                    index = build_index(pool, lang_pair.source)
                report.results.append(run_scenario(
                    config, lang_pair, scenario,
                    backend=backend, pool=pool, test_set=test_set, index=index))
            except ScenarioError as exc:
                report.failures.append(_failure(lang_pair, exc.label, exc.sentence_index,
                                                exc.cause, exc.partial))
            except (CorpusError, ValueError) as exc:
                report.failures.append(_failure(lang_pair, SCENARIO_LABELS[scenario.kind],
                                                None, exc, []))
    report.finished_at = _now()
    if config.output_path:
        report.write(config.output_path)
    return report


def run_size_ablation(config: ExperimentConfig, sizes: Sequence[int]) -> ExperimentReport:
    """Re-run the retrieve scenario at several pool sizes against one test set."""
    report = ExperimentReport(config.snapshot(),
                              backend_model=config.backend.get("model_name", "mock"),
                              started_at=_now())
    report.config["ablation_sizes"] = list(sizes)
    backend = backend_from_config(config.backend)
    scenario = Scenario("retrieve_k", config.k, config.seed)
    for lang_pair in config.lang_pairs:
        for size in sizes:
            label = f"Retrieve ICL Dselect={size}"
            try:
                pool, test_set = _load_split(config, lang_pair, pool_size=size)
                index = build_index(pool, lang_pair.source)
                report.results.append(run_scenario(
                    config, lang_pair, scenario, backend=backend,
                    pool=pool, test_set=test_set, index=index, label=label))
            except ScenarioError as exc:
                report.failures.append(_failure(lang_pair, label, exc.sentence_index,
                                                exc.cause, exc.partial))
            except (CorpusError, OSError, ValueError) as exc:
                report.failures.append(_failure(lang_pair, label, None, exc, []))
    report.finished_at = _now()
    if config.output_path:
        report.write(config.output_path)
    return report


def _failure(lang_pair: LangPair, label: str, sentence_index: int | None,
             cause: Exception, partial: list[dict]) -> dict:
    return {
        "lang_pair": lang_pair.tag,
        "label": label,
        "error": str(cause),
        "failed_sentence_index": sentence_index,
        "partial_per_sentence": partial,
    }


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()
