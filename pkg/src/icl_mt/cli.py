"""Command-line entry point.

Exit codes: 0 on success, 1 on usage errors, 2 on runtime errors. With --json,
exactly one JSON document goes to stdout and all logging goes to stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .bleu import corpus_bleu, mean_sentence_bleu
from .comet import CometRecord, ScorerError, comet_scores
from .corpus import CorpusError, LangPair, load_parallel_corpus, load_tsv_corpus
from .experiment import ExperimentConfig, run_experiment, run_size_ablation
from .llm import LlmError, backend_from_config
from .prompting import Scenario, build_messages, select_random_examples
from .retrieval import build_index, load_index, retrieve_top_k, save_index
from .sampling import mix_seed
from .tokenization import tokenize

log = logging.getLogger("icl_mt")


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad usage by default; the contract here is exit 1
    def error(self, message):
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="icl-mt", description=__doc__)
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("build-index", help="build and persist a retrieval index")
    p.add_argument("--src", help="source-side text file, one sentence per line")
    p.add_argument("--tgt", help="target-side text file, line-aligned with --src")
    p.add_argument("--tsv", help="single TSV file with source<TAB>target lines")
    p.add_argument("--lang-pair", required=True, help="e.g. zh-en")
    p.add_argument("--pool-size", type=int, help="keep only the first N pairs")
    p.add_argument("--out", required=True, help="index output path (JSON)")

    p = sub.add_parser("retrieve", help="top-K demonstrations for a prompt")
    p.add_argument("--index", required=True)
    p.add_argument("--prompt", required=True)
    p.add_argument("--k", type=int, default=4)
    p.add_argument("--mode", choices=["corpus-fit", "refit"], default="corpus-fit")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("translate", help="translate sentences under one scenario")
    p.add_argument("--index", required=True, help="retrieval index (also supplies the pool)")
    p.add_argument("--scenario", choices=["none", "random", "retrieve"], required=True)
    p.add_argument("--k", type=int, default=4)
    p.add_argument("--input", required=True, help="source sentences, one per line")
    p.add_argument("--backend-config", required=True, help="backend JSON config")
    p.add_argument("--mode", choices=["corpus-fit", "refit"], default="corpus-fit")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dump-prompts", help="write every message sequence to this JSON file")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("evaluate", help="score hypotheses against references")
    p.add_argument("--hyp", required=True)
    p.add_argument("--ref", required=True)
    p.add_argument("--src", help="source sentences (required for COMET)")
    p.add_argument("--scorer", help="COMET scorer URL or command")
    p.add_argument("--lang", default="en", help="tokenizer language for BLEU")
    p.add_argument("--sentence-level", action="store_true",
                   help="also report smoothed mean sentence BLEU")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("experiment", help="run the full scenario grid from a config")
    p.add_argument("--config", required=True)

    p = sub.add_parser("ablation", help="pool-size ablation for the retrieve scenario")
    p.add_argument("--config", required=True)
    p.add_argument("--sizes", required=True, help="comma-separated pool sizes")

    return parser


def _read_lines(path: str) -> list[str]:
    return Path(path).read_text(encoding="utf-8").splitlines()


def _cmd_build_index(args) -> int:
    lang_pair = LangPair.from_string(args.lang_pair)
    if args.tsv:
        corpus = load_tsv_corpus(args.tsv, lang_pair)
    elif args.src and args.tgt:
        corpus = load_parallel_corpus(args.src, args.tgt, lang_pair)
    else:
        raise _UsageError("build-index needs --tsv or both --src and --tgt")
    if args.pool_size is not None:
        corpus = corpus.prefix(args.pool_size)
    index = build_index(corpus, lang_pair.source)
    save_index(index, args.out)
    log.info("indexed %d pairs -> %s", len(index), args.out)
    return 0


def _cmd_retrieve(args) -> int:
    index = load_index(args.index)
    ranked = retrieve_top_k(index, args.prompt, args.k, args.mode)
    if args.json:
        doc = {"results": [
            {"rank": i + 1, "score": sp.score, "pair_index": sp.pair_index,
             "source": sp.pair.source_text, "target": sp.pair.target_text}
            for i, sp in enumerate(ranked)
        ]}
        print(json.dumps(doc, ensure_ascii=False))
    else:
        for i, sp in enumerate(ranked):
            print(f"{i + 1}\t{sp.score:.6f}\t{sp.pair.source_text}\t{sp.pair.target_text}")
    return 0


def _cmd_translate(args) -> int:
    index = load_index(args.index)
    with open(args.backend_config, encoding="utf-8") as f:
        backend = backend_from_config(json.load(f))
    lang_pair = index.pairs.lang_pair
    kind = {"none": "zero_shot", "random": "random_k", "retrieve": "retrieve_k"}[args.scenario]
    scenario = Scenario(kind, 0 if kind == "zero_shot" else args.k, args.seed)
    sentences = _read_lines(args.input)
    hypotheses = []
    prompt_dump = []
    for i, text in enumerate(sentences):
        if scenario.kind == "zero_shot":
            examples = []
        elif scenario.kind == "random_k":
            examples = select_random_examples(index.pairs, scenario.k,
                                              mix_seed(scenario.seed, i))
        else:
            examples = [sp.pair for sp in
                        retrieve_top_k(index, text, scenario.k, args.mode)]
        messages = build_messages(scenario, text, examples, lang_pair)
        if args.dump_prompts:
            prompt_dump.append([{"role": m.role, "content": m.content} for m in messages])
        hypotheses.append(backend.complete_chat(messages).text)
    if args.dump_prompts:
        Path(args.dump_prompts).write_text(
            json.dumps(prompt_dump, ensure_ascii=False, indent=2), encoding="utf-8")
    if args.json:
        print(json.dumps({"hypotheses": hypotheses}, ensure_ascii=False))
    else:
        for text in hypotheses:
            print(text)
    return 0


def _cmd_evaluate(args) -> int:
    hyps = _read_lines(args.hyp)
    refs = _read_lines(args.ref)
    bleu = corpus_bleu([tokenize(h, args.lang) for h in hyps],
                       [tokenize(r, args.lang) for r in refs])
    out: dict = {"bleu": bleu.score}
    if args.sentence_level:
        out["mean_sentence_bleu"] = mean_sentence_bleu(
            [tokenize(h, args.lang) for h in hyps],
            [tokenize(r, args.lang) for r in refs])
    if args.scorer:
        if not args.src:
            raise _UsageError("--scorer requires --src")
        srcs = _read_lines(args.src)
        result = comet_scores(args.scorer, [
            CometRecord(s, h, r) for s, h, r in zip(srcs, hyps, refs)
        ])
        out["comet"] = result.mean
        out["comet_checkpoint"] = result.checkpoint
    if args.json:
        print(json.dumps(out, ensure_ascii=False))
    else:
        print(f"BLEU: {bleu.score:.4f}")
        if "mean_sentence_bleu" in out:
            print(f"Mean sentence BLEU: {out['mean_sentence_bleu']:.4f}")
        if "comet" in out:
            print(f"COMET: {out['comet']:.4f}")
    return 0


def _cmd_experiment(args) -> int:
    config = ExperimentConfig.from_file(args.config)
    report = run_experiment(config)
    print(report.render_table(), end="")
    if config.output_path:
        log.info("report written to %s.{json,txt}", config.output_path)
    return 0


def _cmd_ablation(args) -> int:
    config = ExperimentConfig.from_file(args.config)
    sizes = [int(s) for s in args.sizes.split(",") if s.strip()]
    report = run_size_ablation(config, sizes)
    print(report.render_table(), end="")
    return 0


_COMMANDS = {
    "build-index": _cmd_build_index,
    "retrieve": _cmd_retrieve,
    "translate": _cmd_translate,
    "evaluate": _cmd_evaluate,
    "experiment": _cmd_experiment,
    "ablation": _cmd_ablation,
}


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(stream=sys.stderr, level=logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise _UsageError("a subcommand is required")
        return _COMMANDS[args.command](args)
    except _UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"icl-mt: error: {exc}", file=sys.stderr)
        return 1
    except (CorpusError, LlmError, ScorerError, OSError, ValueError, KeyError,
            json.JSONDecodeError) as exc:
        print(f"icl-mt: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
