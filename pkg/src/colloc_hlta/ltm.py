"""Latent tree models over binary variables.

A model is a rooted tree whose internal nodes are latent topic variables and
whose leaves are word variables.  The root carries a marginal ``[p0, p1]``;
every other node ``X`` carries a 2x2 table ``cpt[u, x] = P(X = x | pa(X) = u)``.
The joint distribution is the product of the root marginal and all tables.

Inference is exact: an upward (leaf-to-root) pass of likelihood messages and a
downward pass of prior messages.  Messages are renormalized at every step and
the scale factors accumulated, so long documents do not underflow.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from typing import Mapping, Sequence

import numpy as np

__all__ = [
    "LATENT",
    "WORD",
    "Node",
    "Topic",
    "LatentTreeModel",
    "ModelError",
    "ZeroEvidenceError",
    "joint_probability",
    "infer_posteriors",
    "infer_posteriors_batch",
    "log_evidence",
    "prior_marginals",
    "pairwise_marginal",
    "mutual_information",
    "extract_topics",
    "model_to_json",
    "model_from_json",
    "write_model",
    "read_model",
]

LATENT = "latent"
WORD = "word"
TOPIC_WORDS = 7


class ModelError(ValueError):
    pass


class ZeroEvidenceError(ModelError):
    """The evidence has probability zero under the model."""


@dataclass(frozen=True)
class Node:
    id: str
    name: str
    kind: str
    parent: str | None
    level: int = 0


@dataclass(frozen=True)
class Topic:
    latent_id: str
    level: int
    words: tuple[tuple[str, float], ...]

    @property
    def keywords(self) -> list[str]:
        return [w for w, _ in self.words]


class LatentTreeModel:
    """Immutable binary latent tree model.

    Parameters
    ----------
    nodes : sequence of Node
    root_marginal : array-like, shape (2,)
    cpts : mapping node id -> array-like, shape (2, 2)
        Row index is the parent state, column index the child state.
    tol : float
        Allowed deviation of each distribution's sum from 1.
    """

    def __init__(self, nodes: Sequence[Node], root_marginal, cpts: Mapping[str, object], tol: float = 1e-12):
        self.nodes = tuple(nodes)
        self.root_marginal = np.array(root_marginal, dtype=float)
        self.cpts = {k: np.array(v, dtype=float) for k, v in cpts.items()}
        self._validate(tol)
        self.root_marginal.setflags(write=False)
        for v in self.cpts.values():
            v.setflags(write=False)

    def _validate(self, tol):
        ids = [n.id for n in self.nodes]
        if len(set(ids)) != len(ids):
            raise ModelError("duplicate node id")
        by_id = {n.id: n for n in self.nodes}
        roots = [n for n in self.nodes if n.parent is None]
        if len(roots) != 1:
            raise ModelError(f"expected exactly one root, found {len(roots)}")
        if roots[0].kind != LATENT:
            raise ModelError("root must be a latent node")
        for n in self.nodes:
            if n.kind not in (LATENT, WORD):
                raise ModelError(f"bad node kind {n.kind!r}")
            if n.parent is not None:
                if n.parent not in by_id:
                    raise ModelError(f"unknown parent {n.parent!r} of {n.id!r}")
                if by_id[n.parent].kind != LATENT:
                    raise ModelError(f"word node {n.parent!r} cannot have children")
        if len(self.topological_order) != len(self.nodes):
            raise ModelError("node graph is not a connected tree")
        if self.root_marginal.shape != (2,):
            raise ModelError("root marginal must have two entries")
        _check_dist(self.root_marginal, tol, "root marginal")
        expected = {n.id for n in self.nodes if n.parent is not None}
        if set(self.cpts) != expected:
            raise ModelError("need exactly one CPT per non-root node")
        for k, t in self.cpts.items():
            if t.shape != (2, 2):
                raise ModelError(f"CPT of {k!r} must be 2x2")
            for row in t:
                _check_dist(row, tol, f"CPT row of {k!r}")

    @cached_property
    def index(self) -> dict[str, int]:
        return {n.id: i for i, n in enumerate(self.nodes)}

    @cached_property
    def node(self) -> dict[str, Node]:
        return {n.id: n for n in self.nodes}

    @cached_property
    def root(self) -> str:
        return next(n.id for n in self.nodes if n.parent is None)

    @cached_property
    def children(self) -> dict[str, tuple[str, ...]]:
        ch: dict[str, list[str]] = {n.id: [] for n in self.nodes}
        for n in self.nodes:
            if n.parent is not None and n.parent in ch:
                ch[n.parent].append(n.id)
        return {k: tuple(v) for k, v in ch.items()}

    @cached_property
    def topological_order(self) -> tuple[str, ...]:
        """Root first, every parent before its children (BFS)."""
        order, seen = [], set()
        frontier = [n.id for n in self.nodes if n.parent is None][:1]
        while frontier:
            nxt = []
            for k in frontier:
                if k in seen:
                    continue
                seen.add(k)
                order.append(k)
                nxt.extend(self.children[k])
            frontier = nxt
        return tuple(order)

    @property
    def latent_ids(self) -> list[str]:
        return [n.id for n in self.nodes if n.kind == LATENT]

    @property
    def word_ids(self) -> list[str]:
        return [n.id for n in self.nodes if n.kind == WORD]

    def descendant_words(self, node_id: str) -> list[str]:
        out, stack = [], [node_id]
        while stack:
            k = stack.pop()
            if self.node[k].kind == WORD:
                out.append(k)
            stack.extend(reversed(self.children[k]))
        return out

    def depth(self, node_id: str) -> int:
        d = 0
        while self.node[node_id].parent is not None:
            node_id = self.node[node_id].parent
            d += 1
        return d

    def __eq__(self, other):
        return (
            isinstance(other, LatentTreeModel)
            and self.nodes == other.nodes
            and np.array_equal(self.root_marginal, other.root_marginal)
            and self.cpts.keys() == other.cpts.keys()
            and all(np.array_equal(self.cpts[k], other.cpts[k]) for k in self.cpts)
        )

    def __repr__(self):
        return f"LatentTreeModel({len(self.latent_ids)} latent, {len(self.word_ids)} word nodes)"


def _check_dist(p, tol, what):
    if np.any(~np.isfinite(p)) or np.any(p < 0) or np.any(p > 1):
        raise ModelError(f"{what} has entries outside [0, 1]")
    if abs(p.sum() - 1.0) > tol:
        raise ModelError(f"{what} sums to {p.sum()!r}, not 1")


def joint_probability(model: LatentTreeModel, assignment: Mapping[str, int]) -> float:
    """Probability of a full assignment: root marginal times every edge term."""
    missing = [n.id for n in model.nodes if n.id not in assignment]
    if missing:
        raise ModelError(f"assignment misses nodes: {missing[:5]}")
    p = model.root_marginal[assignment[model.root]]
    for n in model.nodes:
        if n.parent is not None:
            p *= model.cpts[n.id][assignment[n.parent], assignment[n.id]]
    return float(p)


def prior_marginals(model: LatentTreeModel) -> dict[str, np.ndarray]:
    """Marginal ``[P(X=0), P(X=1)]`` of every node by pushing the root down."""
    marg = {model.root: model.root_marginal.copy()}
    for k in model.topological_order[1:]:
        marg[k] = marg[model.node[k].parent] @ model.cpts[k]
    return marg


def _evidence_likelihoods(model, evidence_rows, observed_ids):
    B = evidence_rows.shape[0]
    lik = np.ones((B, len(model.nodes), 2))
    for j, k in enumerate(observed_ids):
        v = evidence_rows[:, j]
        i = model.index[k]
        lik[:, i, 0] = np.where(v == 0, 1.0, 0.0)
        lik[:, i, 1] = np.where(v == 1, 1.0, 0.0)
    return lik


def _rescale(v):
    s = v.sum(axis=1, keepdims=True)
    return np.divide(v, s, out=np.zeros_like(v), where=s > 0)


def _propagate(model: LatentTreeModel, lik: np.ndarray):
    """Exact node beliefs for a batch of evidence likelihood vectors.

    ``lik`` has shape (B, n_nodes, 2).  Returns beliefs of the same shape and
    the per-row log probability of the evidence.
    """
    B = lik.shape[0]
    order = model.topological_order
    idx = model.index
    up: dict[str, np.ndarray] = {}
    lam: dict[str, np.ndarray] = {}
    log_z = np.zeros(B)

    for k in reversed(order):
        lk = lik[:, idx[k], :].copy()
        for c in model.children[k]:
            lk *= up[c]
            s = lk.sum(axis=1)
            if np.any(s <= 0):
                raise ZeroEvidenceError("evidence has probability zero under the model")
            log_z += np.log(s)
            lk /= s[:, None]
        lam[k] = lk
        if k == model.root:
            continue
        msg = lk @ model.cpts[k].T
        s = msg.sum(axis=1)
        if np.any(s <= 0):
            raise ZeroEvidenceError("evidence has probability zero under the model")
        log_z += np.log(s)
        up[k] = msg / s[:, None]

    z_root = lam[model.root] @ model.root_marginal
    if np.any(z_root <= 0):
        raise ZeroEvidenceError("evidence has probability zero under the model")
    log_z += np.log(z_root)

    beliefs = np.empty_like(lik)
    pi: dict[str, np.ndarray] = {model.root: np.broadcast_to(model.root_marginal, (B, 2))}
    for k in order:
        b = pi[k] * lam[k]
        beliefs[:, idx[k], :] = b / b.sum(axis=1, keepdims=True)
        ch = model.children[k]
        if not ch:
            continue
        base = pi[k] * lik[:, idx[k], :]
        msgs = [up[c] for c in ch]
        # product of all sibling messages except one, via prefix/suffix products
        prefix = [np.ones((B, 2))]
        for m in msgs[:-1]:
            prefix.append(_rescale(prefix[-1] * m))
        suffix = np.ones((B, 2))
        for j in range(len(ch) - 1, -1, -1):
            to_child = base * prefix[j] * suffix
            down = to_child @ model.cpts[ch[j]]
            pi[ch[j]] = down / down.sum(axis=1, keepdims=True)
            suffix = _rescale(suffix * msgs[j])
    return beliefs, log_z


def infer_posteriors(model: LatentTreeModel, evidence: Mapping[str, int] | None = None) -> dict[str, float]:
    """``P(Z=1 | evidence)`` for every latent node; evidence on words only."""
    evidence = dict(evidence or {})
    for k, v in evidence.items():
        if k not in model.node:
            raise ModelError(f"unknown node {k!r}")
        if model.node[k].kind != WORD:
            raise ModelError(f"evidence on latent node {k!r} is not allowed")
        if v not in (0, 1):
            raise ModelError(f"evidence value for {k!r} must be 0 or 1")
    ids = list(evidence)
    rows = np.array([[evidence[k] for k in ids]], dtype=np.int8).reshape(1, len(ids))
    beliefs, _ = _propagate(model, _evidence_likelihoods(model, rows, ids))
    return {k: float(beliefs[0, model.index[k], 1]) for k in model.latent_ids}


def infer_posteriors_batch(model: LatentTreeModel, X, word_ids: Sequence[str]) -> np.ndarray:
    """Posteriors for many fully or partially observed documents.

    Parameters
    ----------
    X : array-like, shape (B, len(word_ids))
        Binary observations; column ``j`` is the value of ``word_ids[j]``.

    Returns
    -------
    ndarray, shape (B, n_latent)
        ``P(Z=1 | row)`` with columns in ``model.latent_ids`` order.
    """
    X = np.asarray(X)
    for k in word_ids:
        if k not in model.node or model.node[k].kind != WORD:
            raise ModelError(f"{k!r} is not a word node of the model")
    if X.shape[0] == 0:
        return np.zeros((0, len(model.latent_ids)))
    beliefs, _ = _propagate(model, _evidence_likelihoods(model, X, list(word_ids)))
    cols = [model.index[k] for k in model.latent_ids]
    return beliefs[:, cols, 1]


def log_evidence(model: LatentTreeModel, X, word_ids: Sequence[str]) -> np.ndarray:
    """Per-row ``log P(row)`` under the model."""
    X = np.asarray(X)
    _, lz = _propagate(model, _evidence_likelihoods(model, X, list(word_ids)))
    return lz


def _path(model: LatentTreeModel, a: str, b: str) -> list[str]:
    up_a = [a]
    while model.node[up_a[-1]].parent is not None:
        up_a.append(model.node[up_a[-1]].parent)
    up_b = [b]
    while model.node[up_b[-1]].parent is not None:
        up_b.append(model.node[up_b[-1]].parent)
    on_a = set(up_a)
    lca = next(k for k in up_b if k in on_a)
    return up_a[: up_a.index(lca) + 1] + list(reversed(up_b[: up_b.index(lca)]))


def pairwise_marginal(model: LatentTreeModel, a: str, b: str, marginals=None) -> np.ndarray:
    """Joint table ``J[x_a, x_b]`` of two nodes, walked along their tree path."""
    if a == b:
        raise ModelError("pairwise_marginal needs two distinct nodes")
    for k in (a, b):
        if k not in model.node:
            raise ModelError(f"unknown node {k!r}")
    marg = marginals if marginals is not None else prior_marginals(model)
    path = _path(model, a, b)
    J = np.diag(marg[a])
    for cur, nxt in zip(path, path[1:]):
        if model.node[cur].parent == nxt:
            # reverse the edge by Bayes' rule: P(nxt | cur)
            with np.errstate(divide="ignore", invalid="ignore"):
                rev = model.cpts[cur].T * marg[nxt][None, :] / marg[cur][:, None]
            rev[~np.isfinite(rev)] = 0.0
            J = J @ rev
        else:
            J = J @ model.cpts[nxt]
    return J


def mutual_information(joint) -> float:
    """Mutual information (nats) of a 2x2 joint distribution."""
    p = np.asarray(joint, dtype=float)
    if p.shape != (2, 2):
        raise ValueError("joint must be 2x2")
    if np.any(p < 0):
        raise ValueError("joint has negative entries")
    if abs(p.sum() - 1.0) > 1e-9:
        raise ValueError(f"joint sums to {p.sum()!r}, not 1")
    pa = p.sum(axis=1)
    pb = p.sum(axis=0)
    mask = p > 0
    # separate logs: pa * pb can underflow for subnormal entries
    a, b = np.nonzero(mask)
    mi = float(np.sum(p[mask] * (np.log(p[mask]) - np.log(pa[a]) - np.log(pb[b]))))
    return max(mi, 0.0)


def extract_topics(model: LatentTreeModel, top_k: int = TOPIC_WORDS, basis: str = "model", matrix=None) -> list[Topic]:
    """Characterize every latent node by its highest-MI descendant words.

    Parameters
    ----------
    basis : {"model", "empirical"}
        ``"model"`` uses the model's own pairwise distributions.  ``"empirical"``
        pairs observed word presence in ``matrix`` with the posterior of the
        latent in each document.
    """
    if basis == "model":
        marg = prior_marginals(model)

        def mi(z, w):
            return mutual_information(pairwise_marginal(model, z, w, marg))

    elif basis == "empirical":
        if matrix is None:
            raise ValueError("empirical MI needs a document-term matrix")
        X = matrix.dense()
        post = infer_posteriors_batch(model, X, matrix.tokens)
        col = {t: j for j, t in enumerate(matrix.tokens)}
        lcol = {z: j for j, z in enumerate(model.latent_ids)}

        def mi(z, w):
            if w not in col:
                return 0.0
            q = post[:, lcol[z]]
            x = X[:, col[w]].astype(float)
            n = len(x)
            J = np.array(
                [[np.sum((1 - q) * (1 - x)), np.sum((1 - q) * x)], [np.sum(q * (1 - x)), np.sum(q * x)]]
            ) / n
            return mutual_information(J)

    else:
        raise ValueError(f"unknown MI basis {basis!r}")

    topics = []
    for z in model.latent_ids:
        scored = [(w, mi(z, w)) for w in model.descendant_words(z)]
        scored.sort(key=lambda wm: (-wm[1], wm[0]))
        topics.append(Topic(z, model.node[z].level, tuple(scored[:top_k])))
    return topics


def _r12(x: float) -> float:
    return float(f"{x:.12g}")


def model_to_json(model: LatentTreeModel) -> str:
    doc = {
        "nodes": [
            {"id": n.id, "name": n.name, "kind": n.kind, "parent": n.parent, "level": n.level} for n in model.nodes
        ],
        "root_marginal": [_r12(x) for x in model.root_marginal],
        "cpts": {
            n.id: [[_r12(x) for x in row] for row in model.cpts[n.id]] for n in model.nodes if n.parent is not None
        },
    }
    return json.dumps(doc, indent=1) + "\n"


def model_from_json(text: str) -> LatentTreeModel:
    doc = json.loads(text)
    nodes = [Node(d["id"], d["name"], d["kind"], d["parent"], int(d["level"])) for d in doc["nodes"]]

    def renorm(p):
        p = np.array(p, dtype=float)
        if abs(p.sum() - 1.0) > 1e-9:
            raise ModelError(f"distribution {p.tolist()} does not sum to 1")
        return p / p.sum()

    root = renorm(doc["root_marginal"])
    cpts = {k: np.vstack([renorm(r) for r in v]) for k, v in doc["cpts"].items()}
    return LatentTreeModel(nodes, root, cpts)


def write_model(path, model: LatentTreeModel) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(model_to_json(model))


def read_model(path) -> LatentTreeModel:
    with open(path, encoding="utf-8") as fh:
        return model_from_json(fh.read())
