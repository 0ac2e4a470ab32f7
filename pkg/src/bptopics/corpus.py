"""Sparse bag-of-words corpora, vocabularies and per-document metadata.

On disk everything is 1-based (UCI docword convention); in memory document
and word ids are 0-based numpy arrays sorted by (doc, word).
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import IO, Iterable, Optional, Sequence, Union

import numpy as np

TextSource = Union[str, IO[str]]


class CorpusFormatError(ValueError):
    """Raised for malformed corpus, vocabulary or metadata input."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"{message} at line {line}"
        super().__init__(message)


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class SparseCorpus:
    """Nonzero document-word counts ``x[w, d]``.

    ``doc_ids``, ``word_ids`` and ``counts`` are parallel arrays, one slot per
    nonzero entry, sorted ascending by (doc, word) with no repeated pair.
    """

    num_docs: int
    num_words: int
    doc_ids: np.ndarray
    word_ids: np.ndarray
    counts: np.ndarray
    doc_lengths: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.num_docs < 1 or self.num_words < 1:
            raise CorpusFormatError("corpus dimensions must be positive")
        d = np.ascontiguousarray(self.doc_ids, dtype=np.int64)
        w = np.ascontiguousarray(self.word_ids, dtype=np.int64)
        c = np.ascontiguousarray(self.counts, dtype=np.int64)
        if not (d.shape == w.shape == c.shape) or d.ndim != 1:
            raise CorpusFormatError("entry arrays must be 1-d and of equal length")
        if d.size:
            if d.min() < 0 or d.max() >= self.num_docs:
                raise CorpusFormatError("document id out of range")
            if w.min() < 0 or w.max() >= self.num_words:
                raise CorpusFormatError("word id out of range")
            if c.min() <= 0:
                raise CorpusFormatError("nonpositive count")
            key = d * self.num_words + w
            if np.any(np.diff(key) <= 0):
                raise CorpusFormatError("entries must be sorted by (doc, word) without duplicates")
        lengths = np.bincount(d, weights=c, minlength=self.num_docs).astype(np.int64)
        object.__setattr__(self, "doc_ids", _readonly(d))
        object.__setattr__(self, "word_ids", _readonly(w))
        object.__setattr__(self, "counts", _readonly(c))
        object.__setattr__(self, "doc_lengths", _readonly(lengths))

    @classmethod
    def from_entries(cls, num_docs: int, num_words: int,
                     entries: Iterable[tuple[int, int, int]]) -> "SparseCorpus":
        """Build from 0-based ``(doc, word, count)`` triples in any order.

        Repeated (doc, word) pairs are merged by summing their counts.
        """
        merged: dict[tuple[int, int], int] = {}
        for d, w, c in entries:
            if c <= 0:
                raise CorpusFormatError("nonpositive count")
            merged[(d, w)] = merged.get((d, w), 0) + c
        keys = sorted(merged)
        return cls(
            num_docs,
            num_words,
            np.array([k[0] for k in keys], dtype=np.int64),
            np.array([k[1] for k in keys], dtype=np.int64),
            np.array([merged[k] for k in keys], dtype=np.int64),
        )

    @property
    def nnz(self) -> int:
        return int(self.counts.size)

    @property
    def total_tokens(self) -> int:
        return int(self.counts.sum())

    def entries(self) -> list[tuple[int, int, int]]:
        """1-based ``(doc, word, count)`` triples in storage order."""
        return [(int(d) + 1, int(w) + 1, int(c))
                for d, w, c in zip(self.doc_ids, self.word_ids, self.counts)]

    def __eq__(self, other):
        if not isinstance(other, SparseCorpus):
            return NotImplemented
        return (self.num_docs == other.num_docs
                and self.num_words == other.num_words
                and np.array_equal(self.doc_ids, other.doc_ids)
                and np.array_equal(self.word_ids, other.word_ids)
                and np.array_equal(self.counts, other.counts))

    __hash__ = None


@dataclass(frozen=True)
class Vocabulary:
    terms: tuple[str, ...]

    def __len__(self):
        return len(self.terms)

    def __getitem__(self, word_id: int) -> str:
        return self.terms[word_id]


@dataclass(frozen=True)
class DocMetadata:
    """Per-document id lists; ``ids[d]`` is a sorted tuple of 0-based ids.

    ``kind`` is ``"authors"`` or ``"labels"`` and ``num_ids`` the size of the
    id space (A authors or K topics).
    """

    kind: str
    ids: tuple[tuple[int, ...], ...]
    num_ids: int

    @property
    def num_docs(self) -> int:
        return len(self.ids)


def _lines(source: TextSource) -> list[str]:
    if isinstance(source, str):
        with open(source, encoding="utf-8") as f:
            return f.read().splitlines()
    return source.read().splitlines()


def _parse_int(token: str, what: str, line: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise CorpusFormatError(f"malformed {what} {token!r}", line) from None


def parse_docword(source: TextSource) -> SparseCorpus:
    """Read a UCI docword file: D, W, NNZ header lines then ``d w count``."""
    lines = _lines(source)
    header = []
    for i, name in enumerate(("document count", "vocabulary size", "nonzero count")):
        if i >= len(lines):
            raise CorpusFormatError(f"missing header ({name})", i + 1)
        parts = lines[i].split()
        if len(parts) != 1:
            raise CorpusFormatError(f"malformed header ({name})", i + 1)
        value = _parse_int(parts[0], "header value", i + 1)
        if value < 0 or (i < 2 and value == 0):
            raise CorpusFormatError(f"malformed header ({name})", i + 1)
        header.append(value)
    num_docs, num_words, declared_nnz = header

    body = [(n, s) for n, s in enumerate(lines[3:], start=4) if s.strip()]
    if len(body) != declared_nnz:
        raise CorpusFormatError(
            f"declared NNZ {declared_nnz} does not match {len(body)} entry lines",
            3)
    triples = []
    for lineno, text in body:
        parts = text.split()
        if len(parts) != 3:
            raise CorpusFormatError("malformed entry", lineno)
        d, w, c = (_parse_int(p, "entry field", lineno) for p in parts)
        if not 1 <= d <= num_docs:
            raise CorpusFormatError("document id out of range", lineno)
        if not 1 <= w <= num_words:
            raise CorpusFormatError("word id out of range", lineno)
        if c <= 0:
            raise CorpusFormatError("nonpositive count", lineno)
        triples.append((d - 1, w - 1, c))
    return SparseCorpus.from_entries(num_docs, num_words, triples)


def format_docword(corpus: SparseCorpus) -> str:
    out = io.StringIO()
    out.write(f"{corpus.num_docs}\n{corpus.num_words}\n{corpus.nnz}\n")
    for d, w, c in corpus.entries():
        out.write(f"{d} {w} {c}\n")
    return out.getvalue()


def write_docword(corpus: SparseCorpus, path: str) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as f:
        f.write(format_docword(corpus))


def parse_vocab(source: TextSource) -> Vocabulary:
    terms = []
    for lineno, line in enumerate(_lines(source), start=1):
        term = line.strip()
        if not term:
            raise CorpusFormatError("empty vocabulary term", lineno)
        terms.append(term)
    return Vocabulary(tuple(terms))


def write_vocab(vocab: Union[Vocabulary, Sequence[str]], path: str) -> None:
    terms = vocab.terms if isinstance(vocab, Vocabulary) else vocab
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for t in terms:
            f.write(f"{t}\n")


def parse_metadata(source: TextSource, kind: str, num_docs: int,
                   num_ids: Optional[int] = None) -> DocMetadata:
    """Read one line of whitespace-separated 1-based ids per document.

    ``kind="authors"`` requires a nonempty list on every line; when
    ``num_ids`` is omitted the author count is the largest id seen.
    ``kind="labels"`` allows empty lines (unrestricted documents).
    """
    if kind not in ("authors", "labels"):
        raise ValueError(f"unknown metadata kind {kind!r}")
    lines = _lines(source)
    # a trailing blank line for a final empty label set is indistinguishable
    # from a terminating newline, so pad rather than reject
    if kind == "labels" and len(lines) == num_docs - 1:
        lines.append("")
    if len(lines) != num_docs:
        raise CorpusFormatError(
            f"{kind} file has {len(lines)} lines, expected {num_docs}")
    ids = []
    for lineno, line in enumerate(lines, start=1):
        row = sorted({_parse_int(tok, "id", lineno) for tok in line.split()})
        if kind == "authors" and not row:
            raise CorpusFormatError("document without authors", lineno)
        for i in row:
            if i < 1 or (num_ids is not None and i > num_ids):
                raise CorpusFormatError(f"{kind[:-1]} id {i} out of range", lineno)
        ids.append(tuple(i - 1 for i in row))
    if num_ids is None:
        num_ids = max((max(r) + 1 for r in ids if r), default=0)
    return DocMetadata(kind, tuple(ids), num_ids)


def write_metadata(meta: DocMetadata, path: str) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as f:
        for row in meta.ids:
            f.write(" ".join(str(i + 1) for i in row) + "\n")
