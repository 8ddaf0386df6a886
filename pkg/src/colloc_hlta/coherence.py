"""Document co-occurrence topic coherence.

For the top ``M`` words ``w_1 .. w_M`` of a topic (in the topic's MI order)::

    TC = sum_{i=2..M} sum_{j<i} ln[(df(w_i, w_j) + 1) / df(w_j)]

``log=False`` drops the logarithm and sums the raw ratios instead.  A method
is scored by the mean over topics having at least ``M`` keywords.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from .bow import DocTermMatrix
from .ltm import Topic

__all__ = [
    "CoherenceReport",
    "CoherenceError",
    "co_document_frequency",
    "document_frequency",
    "topic_coherence",
    "average_coherence",
    "write_report",
]

DEFAULT_M = 4


class CoherenceError(ValueError):
    pass


def _docs_of(matrix: DocTermMatrix, token: str) -> frozenset[int]:
    sets = matrix.token_docs
    if token not in sets:
        raise CoherenceError(f"unknown token: {token!r}")
    return sets[token]


def document_frequency(matrix: DocTermMatrix, w: str) -> int:
    return len(_docs_of(matrix, w))


def co_document_frequency(matrix: DocTermMatrix, wi: str, wj: str) -> int:
    return len(_docs_of(matrix, wi) & _docs_of(matrix, wj))


def topic_coherence(topic, matrix: DocTermMatrix, M: int = DEFAULT_M, log: bool = True) -> float:
    """Coherence of the topic's first ``M`` words.

    ``topic`` is a :class:`~colloc_hlta.ltm.Topic` or a plain word sequence
    already in ranking order.
    """
    words: Sequence[str] = topic.keywords if isinstance(topic, Topic) else list(topic)
    if len(words) < M:
        raise CoherenceError(f"topic has {len(words)} words, needs at least {M}")
    words = words[:M]
    total = 0.0
    for i in range(1, M):
        for j in range(i):
            df_j = document_frequency(matrix, words[j])
            if df_j == 0:
                raise CoherenceError(f"word {words[j]!r} occurs in no document")
            ratio = (co_document_frequency(matrix, words[i], words[j]) + 1) / df_j
            total += math.log(ratio) if log else ratio
    return total


@dataclass
class CoherenceReport:
    scores: dict[str, float] = field(default_factory=dict)
    excluded: list[str] = field(default_factory=list)
    order: list[str] = field(default_factory=list)

    @property
    def n_included(self) -> int:
        return len(self.scores)

    @property
    def n_excluded(self) -> int:
        return len(self.excluded)

    @property
    def has_scores(self) -> bool:
        return bool(self.scores)

    @property
    def average(self) -> float | None:
        """Mean of included scores, or ``None`` when no topic was scorable."""
        if not self.scores:
            return None
        return math.fsum(self.scores.values()) / len(self.scores)

    def to_text(self) -> str:
        lines = []
        for z in self.order:
            if z in self.scores:
                lines.append(f"{z}\t{self.scores[z]:.6f}\tincluded")
            else:
                lines.append(f"{z}\t\texcluded")
        avg = self.average
        lines.append(f"AVERAGE\t{'nan' if avg is None else f'{avg:.6f}'}\t{self.n_included}")
        return "\n".join(lines) + "\n"


def average_coherence(topics: Sequence[Topic], matrix: DocTermMatrix, M: int = DEFAULT_M, log: bool = True) -> CoherenceReport:
    """Score every topic with at least ``M`` keywords and average them."""
    report = CoherenceReport()
    for t in topics:
        report.order.append(t.latent_id)
        if len(t.words) < M:
            report.excluded.append(t.latent_id)
        else:
            report.scores[t.latent_id] = topic_coherence(t, matrix, M, log)
    return report


def write_report(path, report: CoherenceReport) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(report.to_text())
