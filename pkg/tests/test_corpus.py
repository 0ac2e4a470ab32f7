import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bptopics.corpus import (CorpusFormatError, SparseCorpus, format_docword,
                             parse_docword, parse_metadata, parse_vocab)


def docword(text):
    return parse_docword(io.StringIO(text))


def test_parse_docword_basic():
    c = docword("2\n3\n3\n1 1 2\n1 2 1\n2 3 2\n")
    assert (c.num_docs, c.num_words, c.total_tokens) == (2, 3, 5)
    assert c.doc_lengths.tolist() == [3, 2]
    assert c.entries() == [(1, 1, 2), (1, 2, 1), (2, 3, 2)]
    # stored 0-based
    assert c.doc_ids.tolist() == [0, 0, 1]
    assert c.word_ids.tolist() == [0, 1, 2]


def test_duplicate_pairs_are_merged():
    c = docword("1\n1\n2\n1 1 1\n1 1 2\n")
    assert c.entries() == [(1, 1, 3)]
    assert c.doc_lengths.tolist() == [3]


def test_unsorted_input_is_sorted():
    c = docword("2\n2\n3\n2 1 1\n1 2 4\n1 1 1\n")
    assert c.entries() == [(1, 1, 1), (1, 2, 4), (2, 1, 1)]


@pytest.mark.parametrize("text, message, line", [
    ("2\n3\n1\n1 4 1\n", "word id out of range", 4),
    ("2\n3\n1\n3 1 1\n", "document id out of range", 4),
    ("2\n3\n2\n1 1 1\n1 2 0\n", "nonpositive count", 5),
    ("2\n3\n1\n1 2 -3\n", "nonpositive count", 4),
    ("2\n3\n2\n1 1 1\n", "does not match", 3),
    ("2\n3\n1\n1 1 1\n2 2 2\n", "does not match", 3),
    ("x\n3\n1\n1 1 1\n", "malformed", 1),
    ("2\n0\n0\n", "malformed header", 2),
    ("2 3\n3\n0\n", "malformed header", 1),
    ("2\n3\n", "missing header", 3),
    ("2\n3\n1\n1 1\n", "malformed entry", 4),
    ("2\n3\n1\n1 a 1\n", "malformed", 4),
])
def test_parse_docword_errors(text, message, line):
    with pytest.raises(CorpusFormatError) as err:
        docword(text)
    assert message in str(err.value)
    assert err.value.line == line
    assert f"at line {line}" in str(err.value)


def test_empty_corpus_is_allowed():
    c = docword("3\n4\n0\n")
    assert c.nnz == 0 and c.total_tokens == 0
    assert c.doc_lengths.tolist() == [0, 0, 0]


def test_corpus_is_immutable():
    c = docword("1\n2\n1\n1 2 3\n")
    with pytest.raises(ValueError):
        c.counts[0] = 7
    with pytest.raises(AttributeError):
        c.num_docs = 4


def test_constructor_rejects_unsorted_or_duplicate_entries():
    with pytest.raises(CorpusFormatError):
        SparseCorpus(1, 2, np.array([0, 0]), np.array([1, 0]), np.array([1, 1]))
    with pytest.raises(CorpusFormatError):
        SparseCorpus(1, 2, np.array([0, 0]), np.array([1, 1]), np.array([1, 1]))


triples = st.lists(st.tuples(st.integers(1, 6), st.integers(1, 9), st.integers(1, 20)),
                   max_size=40)


@settings(max_examples=60, deadline=None)
@given(triples)
def test_round_trip_and_token_totals(rows):
    text = "6\n9\n%d\n" % len(rows) + "".join("%d %d %d\n" % r for r in rows)
    c = docword(text)
    assert c.total_tokens == sum(r[2] for r in rows) == int(c.doc_lengths.sum())
    again = docword(format_docword(c))
    assert again == c
    assert format_docword(again) == format_docword(c)


def test_parse_vocab():
    v = parse_vocab(io.StringIO("learning\nnetwork\ndata\n"))
    assert len(v) == 3
    # 1-based id 1 and 3
    assert v[0] == "learning" and v[2] == "data"


def test_parse_vocab_empty_file():
    assert len(parse_vocab(io.StringIO(""))) == 0


def test_parse_vocab_blank_line():
    with pytest.raises(CorpusFormatError, match="at line 2"):
        parse_vocab(io.StringIO("a\n\nb\n"))


def test_parse_vocab_utf8(tmp_path):
    p = tmp_path / "vocab.txt"
    p.write_text("réseau\n神经\n", encoding="utf-8")
    assert parse_vocab(str(p)).terms == ("réseau", "神经")


def test_parse_authors():
    m = parse_metadata(io.StringIO("1 2\n2\n"), "authors", num_docs=2, num_ids=2)
    assert m.ids == ((0, 1), (1,))
    assert m.num_ids == 2


def test_author_count_inferred():
    m = parse_metadata(io.StringIO("3\n1 3\n"), "authors", num_docs=2)
    assert m.num_ids == 3


def test_document_without_authors():
    with pytest.raises(CorpusFormatError, match="document without authors at line 2"):
        parse_metadata(io.StringIO("1\n\n2\n"), "authors", num_docs=3)


def test_empty_label_set_is_allowed():
    m = parse_metadata(io.StringIO("1 2\n\n3\n"), "labels", num_docs=3, num_ids=3)
    assert m.ids == ((0, 1), (), (2,))


def test_trailing_empty_label_line():
    m = parse_metadata(io.StringIO("2\n"), "labels", num_docs=2, num_ids=2)
    assert m.ids == ((1,), ())


@pytest.mark.parametrize("text, kind, num_ids, message", [
    ("1\n", "authors", None, "expected 2"),
    ("1\n2\n3\n", "labels", 3, "expected 2"),
    ("1\n4\n", "labels", 3, "out of range at line 2"),
    ("0\n1\n", "authors", None, "out of range at line 1"),
    ("1\nx\n", "authors", None, "malformed"),
])
def test_metadata_errors(text, kind, num_ids, message):
    with pytest.raises(CorpusFormatError, match=message):
        parse_metadata(io.StringIO(text), kind, num_docs=2, num_ids=num_ids)
