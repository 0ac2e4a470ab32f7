"""Topic models fitted by belief propagation, variational Bayes or collapsed Gibbs sampling."""

from .corpus import (CorpusFormatError, DocMetadata, SparseCorpus, Vocabulary,
                     parse_docword, parse_metadata, parse_vocab)
from .engine import (Aggregates, Hyperparameters, MessageBoard, TopicModel,
                     compute_aggregates, estimate_phi, estimate_theta, init_messages,
                     train)
from .evaluation import PerplexityTrace, top_words, training_perplexity

__version__ = "0.1.0"

__all__ = [
    "Aggregates", "CorpusFormatError", "DocMetadata", "Hyperparameters",
    "MessageBoard", "PerplexityTrace", "SparseCorpus", "TopicModel", "Vocabulary",
    "compute_aggregates", "estimate_phi", "estimate_theta", "init_messages",
    "parse_docword", "parse_metadata", "parse_vocab", "top_words", "train",
    "training_perplexity",
]
