"""Collocation extraction by iterative TF-IDF merging, plus a t-test baseline.

The TF-IDF variant used throughout is the corpus-level score::

    tfidf(t) = sum_d tf(t, d) / ln df(t)

Tokens confined to a single document (``df <= 1``) score zero and are never
selected.  Merged tokens join their components with ``-``; since tokenized
words never contain a hyphen, the arity of a merged token is simply its
number of hyphen-separated parts.

``preprocess`` runs ``r`` rounds of pair formation, joint top-``P``
re-selection and greedy left-to-right replacement, then re-scores the
rewritten corpus once more.  After ``r`` rounds no token can have more than
``2 ** r`` component words.
"""

from __future__ import annotations

import math
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .corpus import Corpus, TokenizedDocument

__all__ = [
    "SEPARATOR",
    "TokenStats",
    "Vocabulary",
    "PreprocessParams",
    "join_tokens",
    "arity",
    "compute_token_stats",
    "tfidf_score",
    "tfidf_scores",
    "select_top_p",
    "score_pair_candidates",
    "replace_pairs",
    "preprocess",
    "ttest_scores",
    "ttest_bigrams",
    "ttest_rewrite",
    "write_vocabulary",
    "read_vocabulary",
]

SEPARATOR = "-"


def join_tokens(t1: str, t2: str) -> str:
    return t1 + SEPARATOR + t2


def arity(token: str) -> int:
    return token.count(SEPARATOR) + 1


@dataclass(frozen=True)
class TokenStats:
    token: str
    total_tf: int
    df: int


@dataclass(frozen=True)
class PreprocessParams:
    r: int = 1
    P: int = 5000

    def __post_init__(self):
        if self.r < 0:
            raise ValueError("r must be >= 0")
        if self.P < 1:
            raise ValueError("P must be >= 1")


class Vocabulary:
    """Selected tokens with their scores, ordered by (score desc, token asc)."""

    def __init__(self, entries: Iterable[tuple[str, float]], P: int):
        self.entries = [(str(t), float(s)) for t, s in entries]
        self.P = int(P)
        self._index = {t: i for i, (t, _) in enumerate(self.entries)}
        if len(self._index) != len(self.entries):
            raise ValueError("vocabulary tokens must be unique")
        if len(self.entries) > self.P:
            raise ValueError("vocabulary exceeds its capacity")

    @property
    def tokens(self) -> list[str]:
        return [t for t, _ in self.entries]

    def index(self, token: str) -> int:
        return self._index[token]

    def score(self, token: str) -> float:
        return self.entries[self._index[token]][1]

    def __contains__(self, token) -> bool:
        return token in self._index

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.tokens)

    def __eq__(self, other) -> bool:
        return isinstance(other, Vocabulary) and self.entries == other.entries and self.P == other.P

    def __repr__(self) -> str:
        head = ", ".join(t for t, _ in self.entries[:5])
        more = ", ..." if len(self.entries) > 5 else ""
        return f"Vocabulary(P={self.P}, n={len(self)}, [{head}{more}])"

    def collocations(self) -> list[str]:
        return [t for t in self.tokens if arity(t) >= 2]


def _doc_counter(tokens: Sequence[str]) -> Counter:
    return Counter(tokens)


def _aggregate(per_doc: Iterable[Counter]) -> dict[str, TokenStats]:
    tf: Counter = Counter()
    df: Counter = Counter()
    for c in per_doc:
        tf.update(c)
        df.update(c.keys())
    return {t: TokenStats(t, tf[t], df[t]) for t in sorted(tf) if tf[t] > 0}


def compute_token_stats(corpus: Corpus, threads: int = 1) -> dict[str, TokenStats]:
    """Exact corpus totals and document frequencies for every token.

    Per-document counting may run on a thread pool; accumulation is integer
    and happens in document order, so the result does not depend on
    ``threads``.
    """
    docs = [d.tokens for d in corpus.docs]
    if threads > 1 and len(docs) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            per_doc = list(pool.map(_doc_counter, docs))
    else:
        per_doc = [_doc_counter(d) for d in docs]
    return _aggregate(per_doc)


def tfidf_score(stats: TokenStats) -> float:
    if stats.df <= 1:
        return 0.0
    return stats.total_tf / math.log(stats.df)


def tfidf_scores(stats: Mapping[str, TokenStats]) -> dict[str, float]:
    return {t: tfidf_score(s) for t, s in stats.items()}


def select_top_p(scores: Mapping[str, float], P: int) -> Vocabulary:
    """Keep the ``P`` best positive scores; ties go to the smaller token."""
    if P < 1:
        raise ValueError("P must be >= 1")
    ranked = sorted(((t, s) for t, s in scores.items() if s > 0), key=lambda ts: (-ts[1], ts[0]))
    return Vocabulary(ranked[:P], P)


def _pair_counts(tokens: Sequence[str], vocab) -> Counter:
    """Occurrences of each eligible adjacent pair in one document.

    Each pair type is counted without overlap against itself: in ``a a a``
    the pair ``a-a`` counts once.  Distinct pair types may share a token.
    """
    counts: Counter = Counter()
    last_start: dict[str, int] = {}
    for i in range(len(tokens) - 1):
        t1, t2 = tokens[i], tokens[i + 1]
        if t1 in vocab and t2 in vocab:
            merged = join_tokens(t1, t2)
            if last_start.get(merged, -2) < i - 1:
                counts[merged] += 1
                last_start[merged] = i
    return counts


def score_pair_candidates(corpus: Corpus, vocab) -> dict[str, TokenStats]:
    """Stats of the merged tokens formed from adjacent in-vocabulary pairs."""
    return _aggregate(_pair_counts(d.tokens, vocab) for d in corpus.docs)


def _replace_doc(tokens: Sequence[str], vocab) -> tuple[str, ...]:
    out = []
    i, n = 0, len(tokens)
    while i < n:
        if i + 1 < n:
            merged = join_tokens(tokens[i], tokens[i + 1])
            if merged in vocab:
                out.append(merged)
                i += 2
                continue
        out.append(tokens[i])
        i += 1
    return tuple(out)


def replace_pairs(corpus: Corpus, vocab) -> Corpus:
    """Greedy left-to-right, non-overlapping replacement of selected pairs."""
    return Corpus(tuple(TokenizedDocument(d.id, _replace_doc(d.tokens, vocab)) for d in corpus.docs))


def _round_scores(corpus: Corpus, vocab: Vocabulary) -> dict[str, float]:
    # Per-document counts of current tokens and candidate pairs.  A candidate
    # whose surface already exists as a token is scored on the union of both.
    tf: Counter = Counter()
    df: Counter = Counter()
    for d in corpus.docs:
        c = Counter(d.tokens)
        c.update(_pair_counts(d.tokens, vocab))
        tf.update(c)
        df.update(c.keys())
    return {t: tfidf_score(TokenStats(t, tf[t], df[t])) for t in tf}


def preprocess(corpus: Corpus, params: PreprocessParams, threads: int = 1) -> tuple[Corpus, Vocabulary]:
    """Select a vocabulary of words and collocations and rewrite the corpus.

    Parameters
    ----------
    corpus : Corpus
        Tokenized documents.
    params : PreprocessParams
        ``r`` merge rounds and vocabulary capacity ``P``.

    Returns
    -------
    (Corpus, Vocabulary)
        The corpus with selected pairs replaced by merged tokens, and the
        final top-``P`` vocabulary scored on that rewritten corpus.
    """
    vocab = select_top_p(tfidf_scores(compute_token_stats(corpus, threads)), params.P)
    if params.r == 0:
        return corpus, vocab
    for _ in range(params.r):
        vocab = select_top_p(_round_scores(corpus, vocab), params.P)
        corpus = replace_pairs(corpus, vocab)
    vocab = select_top_p(tfidf_scores(compute_token_stats(corpus, threads)), params.P)
    return corpus, vocab


def ttest_scores(corpus: Corpus) -> dict[tuple[str, str], float]:
    """Student's t statistic for every observed adjacent bigram.

    With ``T`` tokens in total, ``C1``, ``C2`` unigram counts and ``C12`` the
    bigram count, ``t = (x - mu) / sqrt(x / T)`` where ``x = C12 / T`` and
    ``mu = (C1 / T) * (C2 / T)``.  Bigrams never span two documents.
    """
    unigrams: Counter = Counter()
    bigrams: Counter = Counter()
    for d in corpus.docs:
        unigrams.update(d.tokens)
        bigrams.update(zip(d.tokens, d.tokens[1:]))
    T = sum(unigrams.values())
    scores = {}
    for (w1, w2), c12 in bigrams.items():
        x = c12 / T
        mu = (unigrams[w1] / T) * (unigrams[w2] / T)
        scores[(w1, w2)] = (x - mu) / math.sqrt(x / T)
    return scores


def ttest_bigrams(corpus: Corpus, n: int = 1000) -> list[str]:
    """Top-``n`` bigrams by t-score as merged tokens, ties by token order."""
    if n < 1:
        raise ValueError("n must be >= 1")
    scores = ttest_scores(corpus)
    ranked = sorted(((join_tokens(*k), s) for k, s in scores.items()), key=lambda ts: (-ts[1], ts[0]))
    return [t for t, _ in ranked[:n]]


def ttest_rewrite(corpus: Corpus, n: int = 1000) -> Corpus:
    return replace_pairs(corpus, frozenset(ttest_bigrams(corpus, n)))


def write_vocabulary(path, vocab: Vocabulary) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for tok, score in vocab.entries:
            fh.write(f"{tok}\t{score:.6f}\n")


def read_vocabulary(path, P: int | None = None) -> Vocabulary:
    entries = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected token<TAB>score")
            entries.append((parts[0], float(parts[1])))
    return Vocabulary(entries, P if P is not None else max(len(entries), 1))
