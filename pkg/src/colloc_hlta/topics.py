"""Topic hierarchy rendering and per-document topic membership."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bow import DocTermMatrix
from .ltm import LatentTreeModel, ModelError, Topic, extract_topics, infer_posteriors_batch

__all__ = ["TopicHierarchy", "MembershipTable", "render_hierarchy", "compute_memberships", "write_memberships"]


@dataclass(frozen=True)
class TopicHierarchy:
    topics: dict[str, Topic]
    children: dict[str, tuple[str, ...]]
    root: str

    def by_level(self) -> dict[int, list[Topic]]:
        out: dict[int, list[Topic]] = {}
        for t in sorted(self.topics.values(), key=lambda t: -t.level):
            out.setdefault(t.level, []).append(t)
        return out

    def walk(self):
        """Yield ``(depth, topic)`` depth-first from the root."""
        stack = [(0, self.root)]
        while stack:
            depth, z = stack.pop()
            yield depth, self.topics[z]
            stack.extend((depth + 1, c) for c in reversed(self.children[z]))

    def to_text(self) -> str:
        lines = []
        for depth, t in self.walk():
            words = " ".join(f"{w}:{mi:.4f}" for w, mi in t.words)
            lines.append(f"{t.level}\t{'+' * depth}{t.latent_id}\t{words}")
        return "\n".join(lines) + "\n"


def render_hierarchy(model: LatentTreeModel, topics: list[Topic] | None = None) -> TopicHierarchy:
    """Arrange the model's topics along its latent tree.

    Each line of :meth:`TopicHierarchy.to_text` reads
    ``level<TAB>++latent_id<TAB>word:mi ...``, one ``+`` per depth below the root.
    """
    topics = topics if topics is not None else extract_topics(model)
    by_id = {t.latent_id: t for t in topics}
    latent = set(model.latent_ids)
    children = {z: tuple(c for c in model.children[z] if c in latent) for z in model.latent_ids}
    return TopicHierarchy(by_id, children, model.root)


@dataclass(frozen=True)
class MembershipTable:
    doc_ids: tuple[str, ...]
    latent_ids: tuple[str, ...]
    values: np.ndarray

    def to_text(self) -> str:
        lines = ["doc_id\t" + "\t".join(self.latent_ids)]
        for d, row in zip(self.doc_ids, self.values):
            lines.append(d + "\t" + "\t".join(f"{v:.4f}" for v in row))
        return "\n".join(lines) + "\n"


def compute_memberships(model: LatentTreeModel, matrix: DocTermMatrix) -> MembershipTable:
    """``P(Z=1 | d)`` for every document and latent; absent words count as 0."""
    words = set(model.word_ids)
    extra = [t for t in matrix.tokens if t not in words]
    if extra:
        raise ModelError(f"matrix tokens missing from model: {extra[:5]}")
    latents = tuple(model.latent_ids)
    if matrix.n_docs == 0:
        return MembershipTable((), latents, np.zeros((0, len(latents))))
    # every word node is observed: words absent from the matrix columns are 0
    tokens = list(matrix.tokens) + [w for w in model.word_ids if w not in set(matrix.tokens)]
    X = np.zeros((matrix.n_docs, len(tokens)), dtype=np.uint8)
    X[:, : matrix.n_tokens] = matrix.dense()
    vals = infer_posteriors_batch(model, X, tokens)
    return MembershipTable(tuple(matrix.doc_ids), latents, vals)


def write_memberships(path, table: MembershipTable) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(table.to_text())
