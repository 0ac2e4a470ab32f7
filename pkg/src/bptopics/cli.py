"""Command-line front end.

    bptopics train --docword docword.txt --vocab vocab.txt --topics 10 --out run/
    bptopics gen-synthetic --topics 10 --docs 500 --words 1000 --doc-len 100 --out data/
    bptopics perplexity --theta run/theta.csv --phi run/phi.csv --docword docword.txt
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from typing import Optional, Sequence

import numpy as np

from . import atm, engine, lalda, synthetic
from .corpus import (CorpusFormatError, Vocabulary, parse_docword, parse_metadata,
                     parse_vocab, write_docword, write_vocab)
from .evaluation import format_top_words, top_words, training_perplexity

STARS = "*" * 21
CSV_FORMAT = "%.6e"
EARLY_STOP_TOL = 1e-4

_NUMBER_WORDS = ("zero one two three four five six seven eight nine ten eleven twelve "
                 "thirteen fourteen fifteen sixteen seventeen eighteen nineteen twenty").split()


class UsageError(Exception):
    pass


def _count_word(n: int) -> str:
    return _NUMBER_WORDS[n] if n < len(_NUMBER_WORDS) else str(n)


def algorithm_name(model: str, algo: str, schedule: str) -> str:
    if model == "lalda":
        return "LaLDA-sBP"
    if model == "atm":
        return "ATM-sBP"
    if algo == "bp":
        return "sBP" if schedule == "sync" else "aBP"
    return algo.upper()


def iteration_line(iteration: int, iters: int, perplexity: float) -> str:
    return "Iteration %d of %d: %f" % (iteration, iters, perplexity)


def write_matrix(path: str, matrix: np.ndarray) -> None:
    np.savetxt(path, matrix, fmt=CSV_FORMAT, delimiter=",")


def read_matrix(path: str) -> np.ndarray:
    try:
        return np.loadtxt(path, delimiter=",", ndmin=2)
    except ValueError as exc:
        raise CorpusFormatError(f"cannot read matrix {path}: {exc}") from None


def validate_train_args(args) -> None:
    if args.model in ("lalda", "atm"):
        if args.algo != "bp":
            raise UsageError(f"--model {args.model} only supports --algo bp")
        if args.schedule != "sync":
            raise UsageError(f"--model {args.model} only supports --schedule sync")
    if args.model == "atm" and not args.authors:
        raise UsageError("--model atm requires --authors")
    if args.model == "lalda" and not args.labels:
        raise UsageError("--model lalda requires --labels")
    if args.model != "atm" and args.authors:
        raise UsageError("--authors is only used with --model atm")
    if args.model != "lalda" and args.labels:
        raise UsageError("--labels is only used with --model lalda")
    if args.algo == "gs" and args.schedule == "async":
        raise UsageError("--algo gs is always sequential; drop --schedule async")
    if args.algo == "vb" and args.schedule == "async":
        raise UsageError("--algo vb has no asynchronous schedule")
    for flag in ("topics", "iters", "report_every", "top_n", "workers"):
        if getattr(args, flag) < 1:
            raise UsageError(f"--{flag.replace('_', '-')} must be at least 1")
    for flag in ("alpha", "beta"):
        value = getattr(args, flag)
        if value is not None and not value > 0:
            raise UsageError(f"--{flag} must be positive")


class _Outputs:
    """Tracks files written into the output directory so a failed run leaves nothing behind."""

    def __init__(self, directory: str):
        self.directory = directory
        self.created_dir = not os.path.isdir(directory)
        os.makedirs(directory, exist_ok=True)
        self.files: list[str] = []

    def path(self, name: str) -> str:
        p = os.path.join(self.directory, name)
        self.files.append(p)
        return p

    def discard(self) -> None:
        for p in self.files:
            if os.path.exists(p):
                os.remove(p)
        if self.created_dir and not os.listdir(self.directory):
            os.rmdir(self.directory)


def cmd_train(args) -> int:
    validate_train_args(args)
    corpus = parse_docword(args.docword)
    if args.vocab:
        vocab = parse_vocab(args.vocab)
        if len(vocab) != corpus.num_words:
            raise CorpusFormatError(
                f"vocabulary has {len(vocab)} terms, corpus has {corpus.num_words} words")
    else:
        vocab = Vocabulary(tuple(str(w + 1) for w in range(corpus.num_words)))
    meta = None
    if args.model == "atm":
        meta = parse_metadata(args.authors, "authors", corpus.num_docs)
    elif args.model == "lalda":
        meta = parse_metadata(args.labels, "labels", corpus.num_docs, args.topics)
    if corpus.total_tokens == 0:
        raise CorpusFormatError("corpus has no tokens")

    hp = engine.Hyperparameters(args.topics, args.alpha, args.beta)
    name = algorithm_name(args.model, args.algo, args.schedule)
    tol = EARLY_STOP_TOL if args.early_stop else None
    lines: list[str] = []

    def reporter(iteration, perplexity):
        line = iteration_line(iteration, args.iters, perplexity)
        lines.append(line)
        print("    " + line, flush=True)

    outputs = _Outputs(args.out)
    try:
        print(f"{STARS}\nThe {name} Algorithm\n{STARS}")
        start = time.perf_counter()
        common = dict(iters=args.iters, seed=args.seed, report_every=args.report_every,
                      reporter=reporter, tol=tol)
        if args.model == "atm":
            model, _ = atm.train_atm(corpus, meta, hp, workers=args.workers, **common)
            theta_name, theta = "author_theta.csv", model.author_theta
        elif args.model == "lalda":
            masks = lalda.LabelMask.from_metadata(meta, args.topics)
            model, _ = lalda.train_lalda(corpus, hp, masks, workers=args.workers, **common)
            theta_name, theta = "theta.csv", model.theta
        else:
            model, _ = engine.train(corpus, hp, algo=args.algo, schedule=args.schedule,
                                    workers=args.workers, **common)
            theta_name, theta = "theta.csv", model.theta
        print("Elapsed time is %f seconds." % (time.perf_counter() - start))

        table = top_words(model.phi, vocab, args.top_n)
        print(f"\n{STARS}\nTop {_count_word(args.top_n)} words in each of "
              f"{_count_word(args.topics)} topics by {name}\n{STARS}")
        sys.stdout.write(format_top_words(table))

        with open(outputs.path("perplexity.log"), "w", newline="\n") as f:
            f.write("".join(line + "\n" for line in lines))
        write_matrix(outputs.path(theta_name), theta)
        write_matrix(outputs.path("phi.csv"), model.phi)
        with open(outputs.path("topwords.txt"), "w", encoding="utf-8", newline="\n") as f:
            f.write(format_top_words(table))
    except BaseException:
        outputs.discard()
        raise
    return 0


def cmd_gen_synthetic(args) -> int:
    data = synthetic.generate(args.topics, args.docs, args.words, args.doc_len,
                              args.concentration, seed=args.seed, disjoint=args.disjoint)
    outputs = _Outputs(args.out)
    try:
        write_docword(data.corpus, outputs.path("docword.txt"))
        write_vocab(data.vocab, outputs.path("vocab.txt"))
        write_matrix(outputs.path("phi_true.csv"), data.phi)
    except BaseException:
        outputs.discard()
        raise
    print(f"wrote {data.corpus.num_docs} documents, {data.corpus.nnz} entries, "
          f"{data.corpus.total_tokens} tokens to {args.out}")
    return 0


def cmd_perplexity(args) -> int:
    corpus = parse_docword(args.docword)
    theta = read_matrix(args.theta)
    phi = read_matrix(args.phi)
    if theta.shape[1] != phi.shape[1]:
        raise UsageError(f"theta has {theta.shape[1]} topics, phi has {phi.shape[1]}")
    if theta.shape[0] != corpus.num_docs:
        raise UsageError(f"theta has {theta.shape[0]} rows, corpus has {corpus.num_docs} documents")
    if phi.shape[0] != corpus.num_words:
        raise UsageError(f"phi has {phi.shape[0]} rows, corpus has {corpus.num_words} words")
    print("%f" % training_perplexity(engine.TopicModel(theta, phi), corpus))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bptopics", description="LDA-family topic models by BP, VB and Gibbs sampling.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="fit a topic model and write its parameters")
    p.add_argument("--model", choices=("lda", "lalda", "atm"), default="lda")
    p.add_argument("--algo", choices=engine.ALGORITHMS, default="bp")
    p.add_argument("--schedule", choices=engine.SCHEDULES, default="sync")
    p.add_argument("--topics", type=int, default=10)
    p.add_argument("--alpha", type=float, default=None, help="default 50/topics")
    p.add_argument("--beta", type=float, default=0.01)
    p.add_argument("--iters", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--report-every", type=int, default=10)
    p.add_argument("--top-n", type=int, default=5)
    p.add_argument("--docword", required=True)
    p.add_argument("--vocab")
    p.add_argument("--authors")
    p.add_argument("--labels")
    p.add_argument("--out", required=True)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--early-stop", action="store_true",
                   help=f"stop once perplexity changes by less than {EARLY_STOP_TOL:g} (relative)")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("gen-synthetic", help="sample a corpus from known topics")
    p.add_argument("--topics", type=int, required=True)
    p.add_argument("--docs", type=int, required=True)
    p.add_argument("--words", type=int, required=True)
    p.add_argument("--doc-len", type=int, required=True)
    p.add_argument("--concentration", type=float, default=0.1)
    p.add_argument("--disjoint", action="store_true",
                   help="give each topic its own block of the vocabulary")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen_synthetic)

    p = sub.add_parser("perplexity", help="score saved theta/phi against a corpus")
    p.add_argument("--theta", required=True)
    p.add_argument("--phi", required=True)
    p.add_argument("--docword", required=True)
    p.set_defaults(func=cmd_perplexity)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, CorpusFormatError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
