"""Message state, sufficient statistics, parameter estimation and training."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np

from . import _kernels
from .corpus import SparseCorpus
from .evaluation import training_perplexity

log = logging.getLogger(__name__)

Reporter = Callable[[int, float], None]
Seed = Union[int, np.random.Generator]

ALGORITHMS = ("bp", "vb", "gs")
SCHEDULES = ("sync", "async")


@dataclass
class Hyperparameters:
    """Symmetric Dirichlet smoothing and topic count.

    ``alpha`` defaults to ``50 / num_topics``.
    """

    num_topics: int
    alpha: Optional[float] = None
    beta: float = 0.01

    def __post_init__(self):
        if self.num_topics < 1:
            raise ValueError("num_topics must be at least 1")
        if self.alpha is None:
            self.alpha = 50.0 / self.num_topics
        self.alpha = float(self.alpha)
        self.beta = float(self.beta)
        if not self.alpha > 0 or not self.beta > 0:
            raise ValueError("alpha and beta must be positive")


@dataclass
class MessageBoard:
    """Per-entry topic distributions, one row of ``mu`` per corpus entry.

    ``underflows`` counts messages that had to be reset to uniform because
    every unnormalized component vanished.
    """

    mu: np.ndarray
    underflows: int = 0

    @property
    def num_topics(self) -> int:
        return self.mu.shape[1]


@dataclass
class Aggregates:
    doc_topic: np.ndarray
    word_topic: np.ndarray
    topic_total: np.ndarray


@dataclass
class TopicModel:
    """``theta`` is D x K (rows sum to 1), ``phi`` is W x K (columns sum to 1)."""

    theta: np.ndarray
    phi: np.ndarray


def init_messages(corpus: SparseCorpus, num_topics: int, seed: Seed) -> MessageBoard:
    if num_topics < 1:
        raise ValueError("num_topics must be at least 1")
    rng = np.random.default_rng(seed)
    mu = rng.random((corpus.nnz, num_topics))
    bad = _kernels.normalize_rows(mu)
    return MessageBoard(mu, bad)


def compute_aggregates(board: MessageBoard, corpus: SparseCorpus) -> Aggregates:
    if board.mu.ndim != 2 or board.mu.shape[0] != corpus.nnz:
        raise ValueError(
            f"message board has {board.mu.shape[0]} rows, corpus has {corpus.nnz} entries")
    mu = np.ascontiguousarray(board.mu, dtype=np.float64)
    doc_topic = _kernels.accumulate(corpus.doc_ids, corpus.counts, mu, corpus.num_docs)
    word_topic = _kernels.accumulate(corpus.word_ids, corpus.counts, mu, corpus.num_words)
    return Aggregates(doc_topic, word_topic, _kernels.column_sums(word_topic))


def smooth_rows(counts: np.ndarray, alpha: float) -> np.ndarray:
    smoothed = counts + alpha
    return smoothed / smoothed.sum(axis=1, keepdims=True)


def estimate_theta(agg: Aggregates, hp: Hyperparameters) -> np.ndarray:
    return smooth_rows(agg.doc_topic, hp.alpha)


def estimate_phi(agg: Aggregates, hp: Hyperparameters) -> np.ndarray:
    num_words = agg.word_topic.shape[0]
    return (agg.word_topic + hp.beta) / (agg.topic_total + num_words * hp.beta)


def estimate(agg: Aggregates, hp: Hyperparameters) -> TopicModel:
    return TopicModel(estimate_theta(agg, hp), estimate_phi(agg, hp))


def run_loop(iters: int, report_every: int, sweep: Callable[[int], None],
             snapshot: Callable[[], tuple[object, float]],
             reporter: Optional[Reporter] = None,
             tol: Optional[float] = None):
    """Drive ``iters`` sweeps, reporting perplexity on schedule.

    ``snapshot()`` returns ``(model, perplexity)`` for the current state.
    With ``tol`` set, stops early once the relative change between two
    consecutive reports drops below it. Returns the final model.
    """
    if iters < 1:
        raise ValueError("iters must be at least 1")
    if report_every < 1:
        raise ValueError("report_every must be at least 1")
    previous = None
    for it in range(1, iters + 1):
        sweep(it)
        if it % report_every and it != iters:
            continue
        model, perplexity = snapshot()
        if reporter is not None:
            reporter(it, perplexity)
        if tol is not None and previous is not None:
            if abs(previous - perplexity) <= tol * previous:
                log.info("converged at iteration %d", it)
                return model
        previous = perplexity
    return model


def train(corpus: SparseCorpus, hp: Hyperparameters, algo: str = "bp",
          schedule: str = "sync", iters: int = 500, seed: Seed = 0,
          report_every: int = 10, reporter: Optional[Reporter] = None,
          workers: int = 1, tol: Optional[float] = None, check: bool = False):
    """Fit LDA with the chosen message-update rule.

    Returns ``(TopicModel, state)`` where ``state`` is the final
    :class:`MessageBoard` (BP, VB) or :class:`~bptopics.updaters.TokenState`
    (GS). Only BP has an asynchronous schedule; VB and GS ignore
    ``schedule``. ``check`` cross-checks the incrementally maintained
    aggregates of asynchronous BP against a full recomputation after every
    sweep.
    """
    from . import updaters

    if algo not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algo!r}")
    if schedule not in SCHEDULES:
        raise ValueError(f"unknown schedule {schedule!r}")
    rng = np.random.default_rng(seed)

    if algo == "gs":
        state = updaters.gs_init(corpus, hp, rng)

        def sweep(it):
            updaters.gs_sweep(state, corpus, hp, rng)

        def snapshot():
            model = estimate(updaters.gs_messages(state, corpus, hp), hp)
            return model, training_perplexity(model, corpus)

        model = run_loop(iters, report_every, sweep, snapshot, reporter, tol)
        return model, state

    board = init_messages(corpus, hp.num_topics, rng)
    current = {"board": board, "agg": compute_aggregates(board, corpus)}

    def sweep(it):
        b, agg = current["board"], current["agg"]
        if algo == "vb":
            b = updaters.vb_sweep(b, agg, corpus, hp, workers=workers)
        elif schedule == "sync":
            b = updaters.bp_sweep_sync(b, agg, corpus, hp, workers=workers)
        else:
            updaters.bp_sweep_async(b, agg, corpus, hp)
            if check:
                check_aggregates(agg, compute_aggregates(b, corpus))
        current["board"] = b
        current["agg"] = compute_aggregates(b, corpus)

    def snapshot():
        model = estimate(current["agg"], hp)
        return model, training_perplexity(model, corpus)

    model = run_loop(iters, report_every, sweep, snapshot, reporter, tol)
    return model, current["board"]


def check_aggregates(incremental: Aggregates, exact: Aggregates, atol: float = 1e-6):
    for name in ("doc_topic", "word_topic", "topic_total"):
        a, b = getattr(incremental, name), getattr(exact, name)
        err = float(np.max(np.abs(a - b))) if a.size else 0.0
        if err > atol:
            raise RuntimeError(f"incremental {name} drifted by {err:.3g}")
