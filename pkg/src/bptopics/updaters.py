"""Message-update rules: belief propagation, variational Bayes, Gibbs sampling.

BP and VB rewrite every message from the previous sweep's aggregates
(``bp_sweep_sync``, ``vb_sweep``) or, for ``bp_sweep_async``, entry by entry
with the aggregates adjusted in place. GS works on expanded word tokens and
keeps integer count tables.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .corpus import SparseCorpus
from .engine import Aggregates, Hyperparameters, MessageBoard, Seed


def digamma(x: float) -> float:
    """Psi(x) for x > 0, accurate to about 1e-14 absolute.

    Shifts x above 10 with psi(x) = psi(x + 1) - 1/x, then sums the
    asymptotic expansion in 1/x^2.
    """
    x = float(x)
    if not x > 0 or math.isinf(x):
        raise ValueError(f"digamma requires a finite positive argument, got {x}")
    return float(_kernels.digamma(x))


def _chunks(n: int, workers: int) -> list[tuple[int, int]]:
    workers = max(1, min(workers, n))
    bounds = np.linspace(0, n, workers + 1).astype(np.int64)
    return [(int(lo), int(hi)) for lo, hi in zip(bounds[:-1], bounds[1:])]


def run_chunked(kernel, n: int, workers: int, args: tuple) -> int:
    """Call ``kernel(*args, lo, hi)`` over a partition of ``range(n)``.

    Kernels write disjoint output rows and read only shared inputs, so the
    result does not depend on ``workers``. Returns the summed kernel return
    values (underflow counts).
    """
    parts = _chunks(n, workers)
    if len(parts) <= 1:
        return int(kernel(*args, 0, n))
    with ThreadPoolExecutor(max_workers=len(parts)) as pool:
        futures = [pool.submit(kernel, *args, lo, hi) for lo, hi in parts]
        return sum(int(f.result()) for f in futures)


def _check(board: MessageBoard, agg: Aggregates, corpus: SparseCorpus):
    if board.mu.shape[0] != corpus.nnz:
        raise ValueError(
            f"message board has {board.mu.shape[0]} rows, corpus has {corpus.nnz} entries")
    if agg.doc_topic.shape != (corpus.num_docs, board.mu.shape[1]):
        raise ValueError("aggregates do not match the corpus and board")


def bp_sweep_sync(board: MessageBoard, agg: Aggregates, corpus: SparseCorpus,
                  hp: Hyperparameters, workers: int = 1) -> MessageBoard:
    """One synchronous (Jacobi) BP sweep; returns a new board."""
    _check(board, agg, corpus)
    out = np.empty_like(board.mu)
    bad = run_chunked(_kernels.bp_sync, corpus.nnz, workers, (
        corpus.doc_ids, corpus.word_ids, corpus.counts, board.mu,
        agg.doc_topic, agg.word_topic, agg.topic_total,
        hp.alpha, hp.beta, corpus.num_words * hp.beta, out))
    return MessageBoard(out, board.underflows + bad)


def bp_sweep_async(board: MessageBoard, agg: Aggregates, corpus: SparseCorpus,
                   hp: Hyperparameters) -> tuple[MessageBoard, Aggregates]:
    """One asynchronous BP sweep in ascending (doc, word) order, in place.

    Each entry's new message immediately updates the doc, word and topic
    totals seen by the entries after it.
    """
    _check(board, agg, corpus)
    bad = _kernels.bp_async(
        corpus.doc_ids, corpus.word_ids, corpus.counts, board.mu,
        agg.doc_topic, agg.word_topic, agg.topic_total,
        hp.alpha, hp.beta, corpus.num_words * hp.beta)
    board.underflows += int(bad)
    return board, agg


def vb_sweep(board: MessageBoard, agg: Aggregates, corpus: SparseCorpus,
             hp: Hyperparameters, workers: int = 1) -> MessageBoard:
    """One VB sweep.

    The document factor is ``exp(psi(doc_topic + alpha) - psi(doc total))``
    and the word factor ``(word_topic + beta) / (topic_total + W beta)``; both
    include the entry being updated. Evaluated in log space.
    """
    _check(board, agg, corpus)
    out = np.empty_like(board.mu)
    bad = run_chunked(_kernels.vb_sync, corpus.nnz, workers, (
        corpus.doc_ids, corpus.word_ids, corpus.counts,
        agg.doc_topic, agg.word_topic, agg.topic_total,
        hp.alpha, hp.beta, corpus.num_words * hp.beta, out))
    return MessageBoard(out, board.underflows + bad)


@dataclass
class TokenState:
    """Collapsed Gibbs state over expanded tokens.

    Token ``i`` belongs to document ``tok_doc[i]`` and word ``tok_word[i]``;
    tokens are laid out in ascending (doc, word, replica) order.
    """

    assignments: np.ndarray
    tok_doc: np.ndarray
    tok_word: np.ndarray
    count_doc: np.ndarray
    count_word: np.ndarray
    count_topic: np.ndarray

    def check(self, corpus: SparseCorpus) -> None:
        """Raise ``AssertionError`` unless the count tables match the assignments."""
        K = self.count_topic.size
        nd, nw, nk = _histograms(self.tok_doc, self.tok_word, self.assignments,
                                 corpus.num_docs, corpus.num_words, K)
        assert np.array_equal(nd, self.count_doc)
        assert np.array_equal(nw, self.count_word)
        assert np.array_equal(nk, self.count_topic)
        assert np.array_equal(self.count_doc.sum(axis=1), corpus.doc_lengths)
        assert np.array_equal(self.count_word.sum(axis=0), self.count_topic)
        assert int(self.count_topic.sum()) == corpus.total_tokens


def _histograms(tok_doc, tok_word, z, num_docs, num_words, K):
    nd = np.zeros((num_docs, K), dtype=np.int64)
    nw = np.zeros((num_words, K), dtype=np.int64)
    np.add.at(nd, (tok_doc, z), 1)
    np.add.at(nw, (tok_word, z), 1)
    return nd, nw, np.bincount(z, minlength=K).astype(np.int64)


def gs_init(corpus: SparseCorpus, hp: Hyperparameters, seed: Seed) -> TokenState:
    rng = np.random.default_rng(seed)
    tok_doc = np.repeat(corpus.doc_ids, corpus.counts)
    tok_word = np.repeat(corpus.word_ids, corpus.counts)
    z = rng.integers(0, hp.num_topics, size=tok_doc.size, dtype=np.int64)
    nd, nw, nk = _histograms(tok_doc, tok_word, z, corpus.num_docs,
                             corpus.num_words, hp.num_topics)
    return TokenState(z, tok_doc, tok_word, nd, nw, nk)


def gs_sweep(state: TokenState, corpus: SparseCorpus, hp: Hyperparameters,
             rng: np.random.Generator) -> TokenState:
    """Resample every token once, consuming one uniform draw per token."""
    u = rng.random(state.assignments.size)
    _kernels.gs_sweep(state.tok_doc, state.tok_word, state.assignments,
                      state.count_doc, state.count_word, state.count_topic, u,
                      hp.alpha, hp.beta, corpus.num_words * hp.beta)
    return state


def gs_messages(state: TokenState, corpus: SparseCorpus,
                hp: Hyperparameters) -> Aggregates:
    """Aggregates taken directly from the Gibbs count tables."""
    return Aggregates(state.count_doc.astype(np.float64),
                      state.count_word.astype(np.float64),
                      state.count_topic.astype(np.float64))
