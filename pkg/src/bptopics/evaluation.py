"""Training perplexity and top-word extraction."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


def perplexity_from_probs(word_probs: np.ndarray, counts: np.ndarray) -> float:
    """``exp(-sum(x * log p) / sum(x))`` over nonzero entries."""
    total = int(counts.sum())
    if total <= 0:
        raise ValueError("perplexity is undefined for an empty corpus")
    if np.any(word_probs <= 0):
        raise ValueError("model assigns zero probability to an observed word")
    return float(np.exp(-np.dot(counts, np.log(word_probs)) / total))


def training_perplexity(model, corpus) -> float:
    """Perplexity of the corpus under ``p(w|d) = sum_k theta[d,k] phi[w,k]``."""
    theta, phi = model.theta, model.phi
    if theta.shape[0] != corpus.num_docs or phi.shape[0] != corpus.num_words:
        raise ValueError(
            f"model is {theta.shape[0]} docs x {phi.shape[0]} words, "
            f"corpus is {corpus.num_docs} x {corpus.num_words}")
    if theta.shape[1] != phi.shape[1]:
        raise ValueError("theta and phi disagree on the number of topics")
    probs = np.sum(theta[corpus.doc_ids] * phi[corpus.word_ids], axis=1)
    return perplexity_from_probs(probs, corpus.counts.astype(np.float64))


def top_words(phi: np.ndarray, vocab, n: int) -> list[list[str]]:
    """The ``n`` most probable terms of every topic, best first.

    Ties go to the lower word id. ``n`` larger than the vocabulary returns
    every word.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if len(vocab) != phi.shape[0]:
        raise ValueError(f"vocabulary has {len(vocab)} terms, phi has {phi.shape[0]} rows")
    n = min(n, phi.shape[0])
    out = []
    for k in range(phi.shape[1]):
        order = np.argsort(-phi[:, k], kind="stable")[:n]
        out.append([vocab[int(w)] for w in order])
    return out


def format_top_words(table: list[list[str]]) -> str:
    return "".join(" ".join(words) + "\n" for words in table)


@dataclass
class PerplexityTrace:
    """Collects ``(iteration, perplexity)`` points; usable as a reporter."""

    points: list[tuple[int, float]] = field(default_factory=list)

    def __call__(self, iteration: int, perplexity: float) -> None:
        if self.points and iteration <= self.points[-1][0]:
            raise ValueError("iterations must be strictly increasing")
        self.points.append((iteration, perplexity))

    @property
    def iterations(self) -> list[int]:
        return [i for i, _ in self.points]

    @property
    def values(self) -> list[float]:
        return [p for _, p in self.points]
