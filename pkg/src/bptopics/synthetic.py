"""Synthetic corpora drawn from known topics, for recovery tests and demos."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corpus import SparseCorpus, Vocabulary


@dataclass
class SyntheticCorpus:
    corpus: SparseCorpus
    vocab: Vocabulary
    phi: np.ndarray      # W x K_true, columns sum to 1
    theta: np.ndarray    # D x K_true, rows sum to 1


def generate(num_topics: int, num_docs: int, num_words: int, doc_len: int,
             concentration: float, seed: int = 0, disjoint: bool = False) -> SyntheticCorpus:
    """Sample a corpus from the LDA generative process.

    Topic-word and document-topic distributions are drawn from symmetric
    Dirichlet priors with parameter ``concentration``; small values give
    sparse topics and near single-topic documents. With ``disjoint`` the
    vocabulary is split into ``num_topics`` contiguous blocks, topic k only
    emits words from block k, and every document is drawn from a single
    topic, so the word-document graph splits into one block per used topic.
    """
    for name, value in (("num_topics", num_topics), ("num_docs", num_docs),
                        ("num_words", num_words), ("doc_len", doc_len)):
        if int(value) != value or value < 1:
            raise ValueError(f"{name} must be a positive integer")
    if not concentration > 0:
        raise ValueError("concentration must be positive")
    if disjoint and num_words < num_topics:
        raise ValueError("disjoint topics need at least one word per topic")

    rng = np.random.default_rng(seed)
    phi = np.zeros((num_words, num_topics))
    if disjoint:
        blocks = np.array_split(np.arange(num_words), num_topics)
        for k, block in enumerate(blocks):
            phi[block, k] = _dirichlet(rng, concentration, block.size)
    else:
        for k in range(num_topics):
            phi[:, k] = _dirichlet(rng, concentration, num_words)
    if disjoint:
        theta = np.eye(num_topics)[rng.integers(num_topics, size=num_docs)]
    else:
        theta = np.stack([_dirichlet(rng, concentration, num_topics) for _ in range(num_docs)])

    entries = []
    for d in range(num_docs):
        per_topic = rng.multinomial(doc_len, theta[d])
        counts = np.zeros(num_words, dtype=np.int64)
        for k in np.flatnonzero(per_topic):
            counts += rng.multinomial(per_topic[k], phi[:, k])
        entries.extend((d, int(w), int(counts[w])) for w in np.flatnonzero(counts))

    width = len(str(num_words))
    vocab = Vocabulary(tuple(f"w{w + 1:0{width}d}" for w in range(num_words)))
    corpus = SparseCorpus.from_entries(num_docs, num_words, entries)
    return SyntheticCorpus(corpus, vocab, phi, theta)


def _dirichlet(rng: np.random.Generator, concentration: float, size: int) -> np.ndarray:
    if size == 1:
        return np.ones(1)
    p = rng.dirichlet(np.full(size, concentration))
    # tiny concentrations can lose all mass to underflow
    if not np.isfinite(p).all() or p.sum() <= 0:
        p = np.zeros(size)
        p[rng.integers(size)] = 1.0
    return p / p.sum()
