import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from bptopics.corpus import SparseCorpus, Vocabulary
from bptopics.engine import Hyperparameters, TopicModel, train
from bptopics.evaluation import PerplexityTrace, format_top_words, top_words, training_perplexity

SMALL = SparseCorpus.from_entries(2, 3, [(0, 0, 2), (0, 1, 1), (1, 1, 1), (1, 2, 2)])


def random_model(rng, D, W, K):
    theta = rng.dirichlet(np.ones(K), size=D)
    phi = rng.dirichlet(np.ones(W), size=K).T
    return TopicModel(theta, phi)


def test_uniform_model_perplexity_is_vocab_size():
    for K in (1, 3):
        model = TopicModel(np.full((2, K), 1 / K), np.full((3, K), 1 / 3))
        assert training_perplexity(model, SMALL) == pytest.approx(3.0, abs=1e-12)


def test_single_topic_equals_unigram_perplexity():
    beta = 0.1
    model, _ = train(SMALL, Hyperparameters(1, alpha=1.0, beta=beta), iters=2)
    N, W = SMALL.total_tokens, SMALL.num_words
    word_counts = {0: 2, 1: 2, 2: 2}
    unigram = {w: (c + beta) / (N + W * beta) for w, c in word_counts.items()}
    ll = sum(x * np.log(unigram[w]) for _, w, x in oracles.entries(SMALL))
    assert training_perplexity(model, SMALL) == pytest.approx(np.exp(-ll / N), rel=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 4))
def test_matches_oracle_and_is_permutation_invariant(seed, K):
    rng = np.random.default_rng(seed)
    corpus = oracles.random_corpus(rng)
    model = random_model(rng, corpus.num_docs, corpus.num_words, K)
    p = training_perplexity(model, corpus)
    assert p == pytest.approx(oracles.perplexity(corpus, model.theta, model.phi), rel=1e-12)
    assert p >= 1.0 - 1e-12
    perm = rng.permutation(K)
    shuffled = TopicModel(model.theta[:, perm], model.phi[:, perm])
    assert training_perplexity(shuffled, corpus) == pytest.approx(p, rel=1e-12)


def test_perfect_model_has_perplexity_one():
    corpus = SparseCorpus.from_entries(2, 2, [(0, 0, 3), (1, 1, 2)])
    model = TopicModel(np.eye(2), np.eye(2))
    assert training_perplexity(model, corpus) == 1.0


def test_empty_documents_do_not_count():
    corpus = SparseCorpus.from_entries(3, 3, [(0, 0, 2), (0, 1, 1), (2, 2, 1)])
    rng = np.random.default_rng(0)
    model = random_model(rng, 3, 3, 2)
    other = TopicModel(model.theta.copy(), model.phi)
    other.theta[1] = [0.99, 0.01]
    assert training_perplexity(model, corpus) == training_perplexity(other, corpus)


def test_perplexity_errors():
    with pytest.raises(ValueError, match="empty corpus"):
        training_perplexity(TopicModel(np.ones((1, 1)), np.ones((2, 1)) / 2),
                            SparseCorpus.from_entries(1, 2, []))
    with pytest.raises(ValueError, match="zero probability"):
        training_perplexity(TopicModel(np.ones((2, 1)), np.array([[1.0], [0.0], [0.0]])), SMALL)
    with pytest.raises(ValueError):
        training_perplexity(TopicModel(np.ones((3, 1)), np.ones((3, 1)) / 3), SMALL)


VOCAB = Vocabulary(("design", "system", "reasoning", "case", "knowledge", "model"))


def test_top_words_one_hot():
    phi = np.zeros((6, 2))
    phi[4, 0] = 1.0
    phi[1, 1] = 1.0
    table = top_words(phi, VOCAB, 1)
    assert table == [["knowledge"], ["system"]]


def test_top_words_ties_break_by_word_id():
    phi = np.array([[0.3], [0.3], [0.1], [0.1], [0.1], [0.1]])
    assert top_words(phi, VOCAB, 3) == [["design", "system", "reasoning"]]


def test_top_words_more_than_vocab():
    phi = np.full((6, 1), 1 / 6)
    assert top_words(phi, VOCAB, 50) == [list(VOCAB.terms)]


def test_top_words_line_format():
    phi = np.array([[0.3], [0.25], [0.2], [0.15], [0.1], [0.0]])
    line = format_top_words(top_words(phi, VOCAB, 5))
    assert line == "design system reasoning case knowledge\n"


def test_top_words_validation():
    with pytest.raises(ValueError):
        top_words(np.ones((6, 1)), VOCAB, 0)
    with pytest.raises(ValueError):
        top_words(np.ones((5, 1)), VOCAB, 2)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(1e-3, 1e3))
def test_top_words_scale_invariant(seed, scale):
    rng = np.random.default_rng(seed)
    phi = rng.dirichlet(np.ones(6), size=3).T
    scaled = phi.copy()
    scaled[:, 1] *= scale
    assert top_words(phi, VOCAB, 4) == top_words(scaled, VOCAB, 4)


def test_trace_requires_increasing_iterations():
    trace = PerplexityTrace()
    trace(10, 5.0)
    trace(20, 4.0)
    with pytest.raises(ValueError):
        trace(20, 3.0)
    assert trace.iterations == [10, 20] and trace.values == [5.0, 4.0]
