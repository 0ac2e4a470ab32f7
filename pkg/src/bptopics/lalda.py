"""Labeled LDA by belief propagation.

Each labeled document may only use the topics in its label set: after the
ordinary synchronous BP update, message mass outside the set is zeroed and
the remainder renormalized. Documents with an empty label set are
unrestricted.
"""

from __future__ import annotations

from typing import Iterable, Optional, Sequence

import numpy as np

from . import _kernels
from .corpus import DocMetadata, SparseCorpus
from .engine import (Aggregates, Hyperparameters, MessageBoard, Reporter, Seed,
                     compute_aggregates, estimate, init_messages, run_loop)
from .evaluation import training_perplexity
from .updaters import bp_sweep_sync


class LabelMask:
    """Boolean D x K matrix of allowed topics; all-False rows are unrestricted."""

    def __init__(self, allowed: np.ndarray):
        self.allowed = np.ascontiguousarray(allowed, dtype=np.bool_)
        self.active = self.allowed.any(axis=1)

    @classmethod
    def from_labels(cls, labels: Sequence[Iterable[int]], num_topics: int) -> "LabelMask":
        """Build from per-document collections of 0-based topic ids."""
        allowed = np.zeros((len(labels), num_topics), dtype=np.bool_)
        for d, topics in enumerate(labels):
            for k in topics:
                if not 0 <= k < num_topics:
                    raise ValueError(f"label {k + 1} outside 1..{num_topics}")
                allowed[d, k] = True
        return cls(allowed)

    @classmethod
    def from_metadata(cls, meta: DocMetadata, num_topics: int) -> "LabelMask":
        return cls.from_labels(meta.ids, num_topics)

    @property
    def num_docs(self) -> int:
        return self.allowed.shape[0]

    @property
    def num_topics(self) -> int:
        return self.allowed.shape[1]

    def permuted(self, perm: Sequence[int]) -> "LabelMask":
        """Mask with topic ``k`` relabeled as ``perm[k]``."""
        allowed = np.zeros_like(self.allowed)
        allowed[:, np.asarray(perm)] = self.allowed
        return LabelMask(allowed)


def apply_mask(message: np.ndarray, mask: Optional[Iterable[int]]) -> np.ndarray:
    """Restrict a normalized message to the 0-based topic ids in ``mask``.

    An empty or missing mask leaves the message unchanged. If the message has
    no mass inside the mask the result is uniform over the mask.
    """
    out = np.array(message, dtype=np.float64)
    topics = list(mask or ())
    if not topics:
        return out
    allowed = np.zeros(out.size, dtype=np.bool_)
    allowed[topics] = True
    _kernels.mask_one(out, allowed)
    return out


def _mask_board(board: MessageBoard, corpus: SparseCorpus, masks: LabelMask) -> MessageBoard:
    board.underflows += int(_kernels.apply_masks(
        board.mu, corpus.doc_ids, masks.allowed, masks.active))
    return board


def lalda_bp_sweep(board: MessageBoard, agg: Aggregates, corpus: SparseCorpus,
                   hp: Hyperparameters, masks: LabelMask,
                   workers: int = 1) -> MessageBoard:
    if masks.num_docs != corpus.num_docs or masks.num_topics != hp.num_topics:
        raise ValueError("label mask does not match corpus and topic count")
    new = bp_sweep_sync(board, agg, corpus, hp, workers=workers)
    return _mask_board(new, corpus, masks)


def init_masked_messages(corpus: SparseCorpus, masks: LabelMask, seed: Seed) -> MessageBoard:
    return _mask_board(init_messages(corpus, masks.num_topics, seed), corpus, masks)


def train_lalda(corpus: SparseCorpus, hp: Hyperparameters, masks: LabelMask,
                iters: int = 500, seed: Seed = 0, report_every: int = 10,
                reporter: Optional[Reporter] = None, workers: int = 1,
                tol: Optional[float] = None):
    """Synchronous BP training with label masks; returns ``(TopicModel, board)``."""
    rng = np.random.default_rng(seed)
    board = init_masked_messages(corpus, masks, rng)
    current = {"board": board, "agg": compute_aggregates(board, corpus)}

    def sweep(it):
        b = lalda_bp_sweep(current["board"], current["agg"], corpus, hp, masks,
                           workers=workers)
        current["board"] = b
        current["agg"] = compute_aggregates(b, corpus)

    def snapshot():
        model = estimate(current["agg"], hp)
        return model, training_perplexity(model, corpus)

    model = run_loop(iters, report_every, sweep, snapshot, reporter, tol)
    return model, current["board"]
