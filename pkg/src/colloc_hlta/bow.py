"""Binary document-term matrices and their text serialization.

File layout::

    <num_docs> <num_tokens>
    tok_0<TAB>tok_1<TAB>...
    doc_id<TAB>i j k          (ascending present-token indices, maybe none)
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .corpus import Corpus

__all__ = ["DocTermMatrix", "MatrixFormatError", "build_binary_bow", "write_matrix", "read_matrix"]


class MatrixFormatError(ValueError):
    pass


@dataclass(frozen=True)
class DocTermMatrix:
    doc_ids: tuple[str, ...]
    tokens: tuple[str, ...]
    presence: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.doc_ids) != len(self.presence):
            raise ValueError("one presence row per document required")
        V = len(self.tokens)
        for row in self.presence:
            if any(i < 0 or i >= V for i in row):
                raise ValueError("presence index out of range")
            if list(row) != sorted(set(row)):
                raise ValueError("presence rows must be strictly ascending")

    @property
    def n_docs(self) -> int:
        return len(self.doc_ids)

    @property
    def n_tokens(self) -> int:
        return len(self.tokens)

    @cached_property
    def _index(self) -> dict[str, int]:
        return {t: i for i, t in enumerate(self.tokens)}

    def token_index(self, token: str) -> int:
        try:
            return self._index[token]
        except KeyError:
            raise KeyError(f"unknown token: {token!r}") from None

    @cached_property
    def token_docs(self) -> dict[str, frozenset[int]]:
        """Token -> set of row indices of the documents containing it."""
        sets: list[set[int]] = [set() for _ in self.tokens]
        for d, row in enumerate(self.presence):
            for i in row:
                sets[i].add(d)
        return {t: frozenset(s) for t, s in zip(self.tokens, sets)}

    def dense(self) -> np.ndarray:
        """Documents x tokens array of 0/1 (uint8)."""
        X = np.zeros((self.n_docs, self.n_tokens), dtype=np.uint8)
        for d, row in enumerate(self.presence):
            X[d, list(row)] = 1
        return X

    @classmethod
    def from_dense(cls, X, tokens: Sequence[str], doc_ids: Sequence[str] | None = None) -> "DocTermMatrix":
        X = np.asarray(X)
        if doc_ids is None:
            doc_ids = [f"d{i}" for i in range(X.shape[0])]
        rows = tuple(tuple(int(i) for i in np.flatnonzero(r)) for r in X)
        return cls(tuple(doc_ids), tuple(tokens), rows)


def build_binary_bow(corpus: Corpus, vocab) -> DocTermMatrix:
    """Presence matrix over ``vocab`` tokens, in vocabulary order.

    ``vocab`` is a :class:`~colloc_hlta.colloc.Vocabulary` or any sequence of
    tokens.  Tokens outside the vocabulary are ignored.
    """
    tokens = tuple(vocab.tokens if hasattr(vocab, "tokens") else vocab)
    index = {t: i for i, t in enumerate(tokens)}
    rows = []
    for d in corpus.docs:
        rows.append(tuple(sorted({index[t] for t in d.tokens if t in index})))
    return DocTermMatrix(tuple(d.id for d in corpus.docs), tokens, tuple(rows))


def write_matrix(path, m: DocTermMatrix) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"{m.n_docs} {m.n_tokens}\n")
        fh.write("\t".join(m.tokens) + "\n")
        for doc_id, row in zip(m.doc_ids, m.presence):
            fh.write(doc_id + "\t" + " ".join(map(str, row)) + "\n")


def read_matrix(path) -> DocTermMatrix:
    with open(path, encoding="utf-8", newline="") as fh:
        lines = fh.read().split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if len(lines) < 2:
        raise MatrixFormatError(f"{path}: missing header lines")
    try:
        n_docs, n_tokens = (int(x) for x in lines[0].split(" "))
    except ValueError:
        raise MatrixFormatError(f"{path}:1: expected '<num_docs> <num_tokens>'") from None
    tokens = tuple(lines[1].split("\t")) if n_tokens else ()
    if len(tokens) != n_tokens:
        raise MatrixFormatError(f"{path}:2: expected {n_tokens} tokens, found {len(tokens)}")
    if len(lines) - 2 != n_docs:
        raise MatrixFormatError(f"{path}: expected {n_docs} document lines, found {len(lines) - 2}")
    doc_ids, rows = [], []
    for lineno, line in enumerate(lines[2:], start=3):
        doc_id, sep, rest = line.partition("\t")
        if not sep:
            raise MatrixFormatError(f"{path}:{lineno}: missing tab after document id")
        try:
            row = tuple(int(x) for x in rest.split(" ")) if rest else ()
        except ValueError:
            raise MatrixFormatError(f"{path}:{lineno}: non-integer token index") from None
        if any(i < 0 or i >= n_tokens for i in row) or list(row) != sorted(set(row)):
            raise MatrixFormatError(f"{path}:{lineno}: indices must be ascending and in range")
        doc_ids.append(doc_id)
        rows.append(row)
    return DocTermMatrix(tuple(doc_ids), tokens, tuple(rows))
