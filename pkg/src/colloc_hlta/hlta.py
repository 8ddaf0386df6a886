"""Level-wise learning of a binary latent tree model.

This is a deliberately simplified stand-in for progressive-EM HLTA, not a
reimplementation of it.  Each level does the following:

1. compute smoothed empirical mutual information between all variable pairs;
2. greedily partition the variables into islands of mutually informative
   variables (at most ``max_island_size`` each);
3. fit a two-state latent class model to every island by EM;
4. harden each island's latent posterior at 0.5 to get the next level's
   binary data.

Recursion stops once at most ``top_level_max_vars`` variables remain or an
island step yields a single group.  The remaining variables are then put
under one root latent class model.

Randomness
----------
Every EM fit gets its own ``numpy.random.SeedSequence(seed, spawn_key=(level,
island))``.  Restarts are the ``em_restarts`` children spawned from that
sequence.  The root fit uses the level it sits at and island 0.  Any single
fit can therefore be re-run in isolation.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.special import logsumexp

from .bow import DocTermMatrix
from .ltm import LATENT, WORD, LatentTreeModel, Node

__all__ = [
    "LevelData",
    "LcmFit",
    "LearnParams",
    "LearnError",
    "empirical_pairwise_mi",
    "build_islands",
    "fit_lcm_em",
    "harden_level",
    "learn_hierarchy",
    "lcm_loglik",
]

logger = logging.getLogger(__name__)

PROB_FLOOR = 1e-6


class LearnError(ValueError):
    pass


@dataclass(frozen=True)
class LevelData:
    names: tuple[str, ...]
    rows: np.ndarray
    level: int

    def __post_init__(self):
        if self.rows.ndim != 2 or self.rows.shape[1] != len(self.names):
            raise ValueError("row width must equal the number of variable names")


@dataclass(frozen=True)
class LearnParams:
    max_island_size: int = 7
    em_restarts: int = 4
    em_max_iters: int = 200
    em_tol: float = 1e-4
    threshold: float = 0.5
    top_level_max_vars: int = 15
    seed: int = 0

    def __post_init__(self):
        if self.max_island_size < 2 or self.em_restarts < 1 or self.em_max_iters < 1:
            raise ValueError("island size >= 2, restarts >= 1 and iterations >= 1 required")
        if self.em_tol <= 0 or self.top_level_max_vars < 1:
            raise ValueError("em_tol and top_level_max_vars must be positive")
        if not 0 < self.threshold < 1:
            raise ValueError("threshold must lie in (0, 1)")


@dataclass(frozen=True)
class LcmFit:
    """A fitted two-state latent class model over binary members.

    ``cond[j, y]`` is ``P(member_j = 1 | Y = y)``.  ``trace`` holds the EM
    objective (log-likelihood plus the log of the add-one smoothing prior)
    after every iteration, starting from the initial parameters.
    """

    members: tuple[str, ...]
    p_latent: float
    cond: np.ndarray
    loglik: float
    trace: tuple[float, ...] = field(repr=False)
    iterations: int = 0

    def cpt(self, j: int) -> np.ndarray:
        t0, t1 = self.cond[j]
        return np.array([[1 - t0, t0], [1 - t1, t1]])

    def posterior(self, X) -> np.ndarray:
        """``P(Y = 1 | row)`` for each row of ``X``."""
        lj = _log_joint(np.asarray(X, dtype=float), self.p_latent, self.cond)
        return np.exp(lj[:, 1] - logsumexp(lj, axis=1))


def empirical_pairwise_mi(data, block: int = 512) -> np.ndarray:
    """Pairwise MI from add-one smoothed 2x2 co-occurrence tables.

    ``data`` is a :class:`LevelData` or a documents x variables 0/1 array.
    The diagonal is zero by convention.
    """
    X = np.asarray(data.rows if isinstance(data, LevelData) else data, dtype=float)
    N, V = X.shape
    if N < 1:
        raise LearnError("need at least one document")
    n1 = X.sum(axis=0)
    out = np.zeros((V, V))
    total = N + 4.0
    for s in range(0, V, block):
        e = min(V, s + block)
        n11 = X[:, s:e].T @ X
        a = n1[s:e, None]
        b = n1[None, :]
        cells = [N - a - b + n11, b - n11, a - n11, n11]  # 00, 01, 10, 11
        p = [(c + 1.0) / total for c in cells]
        pa1 = p[2] + p[3]
        pb1 = p[1] + p[3]
        margs = [(1 - pa1) * (1 - pb1), (1 - pa1) * pb1, pa1 * (1 - pb1), pa1 * pb1]
        out[s:e] = sum(pc * np.log(pc / m) for pc, m in zip(p, margs))
    out = np.maximum(out, 0.0)
    out = (out + out.T) / 2
    np.fill_diagonal(out, 0.0)
    return out


def build_islands(mi, max_island_size: int = 7) -> list[list[int]]:
    """Greedy partition of variables into groups of mutually high MI.

    A group is seeded with the highest-MI unassigned pair and grown with the
    unassigned variable of highest average MI to the group, as long as that
    variable's own best partner already belongs to the group.  A single
    leftover variable joins the group holding its best partner.  Ties go to
    the lowest index.
    """
    mi = np.asarray(mi, dtype=float)
    V = mi.shape[0]
    if V == 0:
        return []
    if V == 1:
        return [[0]]
    M = mi.copy()
    np.fill_diagonal(M, -np.inf)
    best_partner = np.argmax(M, axis=1)
    unassigned = set(range(V))
    groups: list[list[int]] = []
    while len(unassigned) >= 2:
        U = np.array(sorted(unassigned))
        sub = M[np.ix_(U, U)]
        sub[np.tril_indices(len(U))] = -np.inf
        i, j = np.unravel_index(np.argmax(sub), sub.shape)
        group = [int(U[i]), int(U[j])]
        unassigned -= set(group)
        while len(group) < max_island_size and unassigned:
            cand = np.array(sorted(unassigned))
            avg = M[np.ix_(cand, group)].mean(axis=1)
            c = int(cand[np.argmax(avg)])
            if best_partner[c] not in group:
                break
            group.append(c)
            unassigned.discard(c)
        groups.append(sorted(group))
    if unassigned:
        v = unassigned.pop()
        for g in groups:
            if best_partner[v] in g:
                g.append(v)
                g.sort()
                break
    return groups


def _log_joint(X, p_latent, cond):
    lc = np.log(cond)
    lnc = np.log1p(-cond)
    out = X @ (lc - lnc) + lnc.sum(axis=0)[None, :]
    out[:, 0] += np.log1p(-p_latent)
    out[:, 1] += np.log(p_latent)
    return out


def lcm_loglik(X, p_latent: float, cond, weights=None) -> float:
    """Log-likelihood of binary rows under a two-state latent class model."""
    X = np.asarray(X, dtype=float)
    w = np.ones(len(X)) if weights is None else np.asarray(weights, dtype=float)
    return float(w @ logsumexp(_log_joint(X, p_latent, np.asarray(cond, dtype=float)), axis=1))


def _log_prior(p_latent, cond):
    return float(np.log(p_latent) + np.log1p(-p_latent) + np.sum(np.log(cond) + np.log1p(-cond)))


def _em_run(patterns, counts, p_latent, cond, max_iters, tol):
    N = counts.sum()

    def objective(p, c):
        ll = float(counts @ logsumexp(_log_joint(patterns, p, c), axis=1))
        return ll + _log_prior(p, c), ll

    obj, ll = objective(p_latent, cond)
    trace = [obj]
    it = 0
    for it in range(1, max_iters + 1):
        lj = _log_joint(patterns, p_latent, cond)
        q = np.exp(lj[:, 1] - logsumexp(lj, axis=1)) * counts
        n1 = q.sum()
        r = counts - q
        p_latent = (n1 + 1.0) / (N + 2.0)
        cond = np.column_stack([(r @ patterns + 1.0) / (N - n1 + 2.0), (q @ patterns + 1.0) / (n1 + 2.0)])
        new_obj, ll = objective(p_latent, cond)
        trace.append(new_obj)
        done = (new_obj - obj) <= tol * abs(obj)
        obj = new_obj
        if done:
            break
    return p_latent, cond, ll, trace, it


def fit_lcm_em(columns, params: LearnParams | None = None, seed=None, names: Sequence[str] | None = None) -> LcmFit:
    """Fit a binary latent class model by EM with random restarts.

    Parameters
    ----------
    columns : array-like, shape (N, k)
        Binary data for the ``k`` member variables.
    params : LearnParams
        Supplies ``em_restarts``, ``em_max_iters`` and ``em_tol``.
    seed : int or numpy.random.SeedSequence
        Restart ``i`` draws its initial parameters, uniformly from
        ``[0.2, 0.8]``, from the ``i``-th spawned child sequence.

    Returns
    -------
    LcmFit
        The restart with the highest final log-likelihood, with latent
        states ordered so that ``P(first member = 1 | Y=1) >= P(... | Y=0)``.
    """
    params = params or LearnParams()
    X = np.asarray(columns, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.shape[0] == 0 or X.shape[1] == 0:
        raise LearnError("cannot fit a latent class model to empty data")
    k = X.shape[1]
    names = tuple(names) if names is not None else tuple(f"x{j}" for j in range(k))
    patterns, counts = np.unique(X, axis=0, return_counts=True)
    counts = counts.astype(float)
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(params.seed if seed is None else seed)

    best = None
    for child in ss.spawn(params.em_restarts):
        rng = np.random.default_rng(child)
        p0 = rng.uniform(0.2, 0.8)
        c0 = rng.uniform(0.2, 0.8, size=(k, 2))
        res = _em_run(patterns, counts, p0, c0, params.em_max_iters, params.em_tol)
        if best is None or res[2] > best[2]:
            best = res
    p_latent, cond, ll, trace, iters = best
    if cond[0, 1] < cond[0, 0]:
        p_latent = 1.0 - p_latent
        cond = cond[:, ::-1].copy()
    return LcmFit(names, float(p_latent), cond, float(ll), tuple(trace), iters)


def harden_level(data: LevelData, fits: Sequence[LcmFit], threshold: float = 0.5) -> LevelData:
    """Binary next-level data: each island's latent is 1 iff P(Y=1|row) >= threshold."""
    col = {n: j for j, n in enumerate(data.names)}
    level = data.level + 1
    out = np.zeros((data.rows.shape[0], len(fits)), dtype=np.uint8)
    for i, f in enumerate(fits):
        cols = [col[m] for m in f.members]
        out[:, i] = f.posterior(data.rows[:, cols]) >= threshold
    return LevelData(tuple(latent_name(level, i) for i in range(len(fits))), out, level)


def latent_name(level: int, i: int) -> str:
    return f"Z{level}_{i}"


def _fit_islands(data: LevelData, groups, params: LearnParams, level: int, threads: int) -> list[LcmFit]:
    def job(item):
        i, g = item
        ss = np.random.SeedSequence(params.seed, spawn_key=(level, i))
        return fit_lcm_em(data.rows[:, g], params, ss, [data.names[j] for j in g])

    items = list(enumerate(groups))
    if threads > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(job, items))
    return [job(it) for it in items]


def learn_hierarchy(
    matrix: DocTermMatrix,
    params: LearnParams | None = None,
    threads: int = 1,
    history: list | None = None,
    log: list | None = None,
) -> LatentTreeModel:
    """Learn a latent tree model over the matrix's word variables.

    ``history``, when given, receives one ``(level, LcmFit list)`` entry per
    level in build order; ``log`` receives human-readable progress lines.
    Results do not depend on ``threads``.
    """
    params = params or LearnParams()
    if matrix.n_tokens < 2:
        raise LearnError("need at least two tokens to learn a hierarchy")
    if matrix.n_docs < 1:
        raise LearnError("need at least one document")
    lines = log if log is not None else []
    data = LevelData(tuple(matrix.tokens), matrix.dense(), 0)
    levels: list[tuple[int, list[LcmFit]]] = []

    def record(level, fits):
        levels.append((level, fits))
        if history is not None:
            history.append((level, fits))
        lines.append(f"level {level}: {len(fits)} latent variable(s) over {data.rows.shape[1]} input variable(s)")
        for i, f in enumerate(fits):
            lines.append(f"  {latent_name(level, i)}: {' '.join(f.members)} | loglik {f.loglik:.6f} | iters {f.iterations}")

    while True:
        level = data.level + 1
        groups = build_islands(empirical_pairwise_mi(data), params.max_island_size)
        fits = _fit_islands(data, groups, params, level, threads)
        record(level, fits)
        logger.info("level %d: %d islands", level, len(fits))
        if len(fits) == 1:
            break
        data = harden_level(data, fits, params.threshold)
        if data.rows.shape[1] <= params.top_level_max_vars:
            level = data.level + 1
            fits = _fit_islands(data, [list(range(data.rows.shape[1]))], params, level, threads)
            record(level, fits)
            break

    model = _assemble(levels, matrix.tokens)
    lines.append(f"model: {len(model.latent_ids)} latent, {len(model.word_ids)} word nodes, root {model.root}")
    return model


def _clamp(p):
    return float(min(max(p, PROB_FLOOR), 1.0 - PROB_FLOOR))


def _assemble(levels, tokens) -> LatentTreeModel:
    parent: dict[str, str] = {}
    cpts: dict[str, np.ndarray] = {}
    for level, fits in levels:
        for i, f in enumerate(fits):
            z = latent_name(level, i)
            for j, m in enumerate(f.members):
                parent[m] = z
                t0, t1 = (_clamp(x) for x in f.cond[j])
                cpts[m] = np.array([[1 - t0, t0], [1 - t1, t1]])
    top_level, top_fits = levels[-1]
    root = latent_name(top_level, 0)
    pr = _clamp(top_fits[0].p_latent)

    nodes = [Node(root, root, LATENT, None, top_level)]
    for level, fits in reversed(levels[:-1]):
        for i in range(len(fits)):
            z = latent_name(level, i)
            nodes.append(Node(z, z, LATENT, parent[z], level))
    nodes.extend(Node(t, t, WORD, parent[t], 0) for t in tokens)
    return LatentTreeModel(nodes, [1 - pr, pr], cpts)
