"""Author-topic model by belief propagation.

Every corpus entry carries a joint message over (author, topic) pairs for
the authors of its document, stored as one K-vector per "slot". Slots of
entry ``n`` occupy rows ``slot_ptr[n]:slot_ptr[n+1]`` of ``mu``, in
ascending author order.

For an entry (w, d) with count x the update is::

    mu'(a, k) ~ (A(a, k) + alpha) / sum_k (A(a, k) + alpha)
              * (S(w, k) + beta) / (T(k) - D(d, k) + W beta)

where A excludes this entry's (a, k) mass from the author totals, S
excludes its topic marginal from the word totals, D(d, k) is the topic mass
of the whole document and T the topic totals. Normalization is joint over
all (a, k) of the entry. With one author per document this is exactly the
LDA BP update.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels
from .corpus import DocMetadata, SparseCorpus
from .engine import Hyperparameters, Reporter, Seed, estimate_phi, run_loop, smooth_rows
from .evaluation import perplexity_from_probs
from .updaters import run_chunked


@dataclass
class AuthorMessageBoard:
    mu: np.ndarray
    slot_ptr: np.ndarray
    slot_author: np.ndarray
    underflows: int = 0

    def entry_message(self, n: int) -> np.ndarray:
        """The (num authors of the entry) x K message of entry ``n``."""
        return self.mu[self.slot_ptr[n]:self.slot_ptr[n + 1]]

    def marginals(self) -> np.ndarray:
        """Per-entry topic marginals (NNZ x K), summed over authors."""
        return _kernels.group_sums(self.mu, self.slot_ptr)


@dataclass
class AuthorAggregates:
    author_topic: np.ndarray
    doc_topic: np.ndarray
    word_topic: np.ndarray
    topic_total: np.ndarray


def author_slots(corpus: SparseCorpus, meta: DocMetadata) -> tuple[np.ndarray, np.ndarray]:
    if meta.num_docs != corpus.num_docs:
        raise ValueError(f"author list covers {meta.num_docs} documents, corpus has {corpus.num_docs}")
    sizes = np.array([len(meta.ids[d]) for d in corpus.doc_ids], dtype=np.int64)
    if np.any(sizes == 0):
        raise ValueError("document without authors")
    ptr = np.zeros(corpus.nnz + 1, dtype=np.int64)
    np.cumsum(sizes, out=ptr[1:])
    authors = np.array([a for d in corpus.doc_ids for a in meta.ids[d]], dtype=np.int64)
    return ptr, authors


def init_author_messages(corpus: SparseCorpus, meta: DocMetadata, num_topics: int,
                         seed: Seed) -> AuthorMessageBoard:
    """Uniform variates per (slot, topic), normalized jointly per entry.

    Draws exactly as :func:`bptopics.engine.init_messages` does when every
    document has one author.
    """
    if num_topics < 1:
        raise ValueError("num_topics must be at least 1")
    ptr, authors = author_slots(corpus, meta)
    rng = np.random.default_rng(seed)
    mu = rng.random((authors.size, num_topics))
    bad = _kernels.normalize_groups(mu, ptr)
    return AuthorMessageBoard(mu, ptr, authors, bad)


def compute_author_aggregates(board: AuthorMessageBoard, corpus: SparseCorpus,
                              num_authors: int) -> AuthorAggregates:
    if board.slot_ptr.size != corpus.nnz + 1:
        raise ValueError("author board does not match corpus")
    slot_counts = np.repeat(corpus.counts, np.diff(board.slot_ptr))
    author_topic = _kernels.accumulate(board.slot_author, slot_counts, board.mu, num_authors)
    marg = board.marginals()
    doc_topic = _kernels.accumulate(corpus.doc_ids, corpus.counts, marg, corpus.num_docs)
    word_topic = _kernels.accumulate(corpus.word_ids, corpus.counts, marg, corpus.num_words)
    return AuthorAggregates(author_topic, doc_topic, word_topic,
                            _kernels.column_sums(word_topic))


def atm_bp_sweep(board: AuthorMessageBoard, agg: AuthorAggregates, corpus: SparseCorpus,
                 hp: Hyperparameters, workers: int = 1) -> AuthorMessageBoard:
    """One synchronous sweep; returns a new board."""
    out = np.empty_like(board.mu)
    bad = run_chunked(_kernels.atm_sync, corpus.nnz, workers, (
        corpus.doc_ids, corpus.word_ids, corpus.counts, board.slot_ptr,
        board.slot_author, board.mu, agg.author_topic, agg.doc_topic,
        agg.word_topic, agg.topic_total, hp.alpha, hp.beta,
        corpus.num_words * hp.beta, out))
    return AuthorMessageBoard(out, board.slot_ptr, board.slot_author, board.underflows + bad)


def estimate_author_theta(agg: AuthorAggregates, hp: Hyperparameters) -> np.ndarray:
    return smooth_rows(agg.author_topic, hp.alpha)


@dataclass
class AuthorTopicModel:
    author_theta: np.ndarray
    phi: np.ndarray


def atm_perplexity(author_theta: np.ndarray, phi: np.ndarray, corpus: SparseCorpus,
                   meta: DocMetadata) -> float:
    """Perplexity with ``p(w|d)`` averaged uniformly over the document's authors."""
    if phi.shape[0] != corpus.num_words or author_theta.shape[1] != phi.shape[1]:
        raise ValueError("author_theta, phi and corpus dimensions disagree")
    if author_theta.shape[0] < meta.num_ids:
        raise ValueError(f"author_theta has {author_theta.shape[0]} rows, need {meta.num_ids}")
    ptr, authors = author_slots(corpus, meta)
    slot_words = np.repeat(corpus.word_ids, np.diff(ptr))
    slot_probs = np.sum(author_theta[authors] * phi[slot_words], axis=1)
    probs = _kernels.group_sums(slot_probs[:, None], ptr)[:, 0] / np.diff(ptr)
    return perplexity_from_probs(probs, corpus.counts.astype(np.float64))


def train_atm(corpus: SparseCorpus, meta: DocMetadata, hp: Hyperparameters,
              iters: int = 500, seed: Seed = 0, report_every: int = 10,
              reporter: Optional[Reporter] = None, workers: int = 1,
              tol: Optional[float] = None):
    """Synchronous BP training; returns ``(AuthorTopicModel, AuthorMessageBoard)``."""
    rng = np.random.default_rng(seed)
    num_authors = meta.num_ids
    board = init_author_messages(corpus, meta, hp.num_topics, rng)
    current = {"board": board,
               "agg": compute_author_aggregates(board, corpus, num_authors)}

    def sweep(it):
        b = atm_bp_sweep(current["board"], current["agg"], corpus, hp, workers=workers)
        current["board"] = b
        current["agg"] = compute_author_aggregates(b, corpus, num_authors)

    def snapshot():
        agg = current["agg"]
        model = AuthorTopicModel(estimate_author_theta(agg, hp), estimate_phi(agg, hp))
        return model, atm_perplexity(model.author_theta, model.phi, corpus, meta)

    model = run_loop(iters, report_every, sweep, snapshot, reporter, tol)
    return model, current["board"]

