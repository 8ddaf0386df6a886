"""Independent reference implementations used as test oracles.

Nothing here imports library code paths under test; the oracles work from
plain Python data (token lists, 0/1 lists, probability tables) and favor
obviousness over speed.
"""

from __future__ import annotations

import functools
import itertools
import math
from collections import defaultdict

import numpy as np

WORDS = ["alpha", "beta", "gamma", "delta", "epsilon", "zeta", "eta", "theta", "iota", "kappa", "lambda", "mu"]


# --- counting and TF-IDF ---------------------------------------------------

def naive_token_stats(token_lists):
    """token -> (total_tf, df) by explicit loops."""
    tf = defaultdict(int)
    df = defaultdict(int)
    for doc in token_lists:
        seen = []
        for t in doc:
            tf[t] += 1
            if t not in seen:
                seen.append(t)
        for t in seen:
            df[t] += 1
    return {t: (tf[t], df[t]) for t in tf}


def naive_tfidf(total_tf, df):
    if df < 2:
        return 0.0
    return total_tf / math.log(df)


def naive_top_p(scores, P):
    """Repeatedly take the best remaining item; ties by smaller token."""
    pool = {t: s for t, s in scores.items() if s > 0}
    out = []
    while pool and len(out) < P:
        best = None
        for t, s in pool.items():
            if best is None or s > best[1] or (s == best[1] and t < best[0]):
                best = (t, s)
        out.append(best)
        del pool[best[0]]
    return out


def random_token_lists(rng, n_docs=None, max_len=30, n_types=None):
    n_docs = int(rng.integers(0, 25)) if n_docs is None else n_docs
    n_types = int(rng.integers(1, len(WORDS) + 1)) if n_types is None else n_types
    words = WORDS[:n_types]
    return [[words[int(i)] for i in rng.integers(0, n_types, size=int(rng.integers(0, max_len + 1)))] for _ in range(n_docs)]


# --- t-test ----------------------------------------------------------------

def naive_ttest(token_lists):
    """(w1, w2) -> t for adjacent pairs inside documents."""
    T = sum(len(d) for d in token_lists)
    uni = defaultdict(int)
    bi = defaultdict(int)
    for d in token_lists:
        for t in d:
            uni[t] += 1
        for k in range(len(d) - 1):
            bi[(d[k], d[k + 1])] += 1
    out = {}
    for (a, b), c in bi.items():
        x = c / T
        mu = (uni[a] / T) * (uni[b] / T)
        out[(a, b)] = (x - mu) / math.sqrt(x / T)
    return out


def naive_ttest_top(token_lists, n):
    def cmp(x, y):
        if x[1] != y[1]:
            return -1 if x[1] > y[1] else 1
        return -1 if x[0] < y[0] else (1 if x[0] > y[0] else 0)

    items = [(a + "-" + b, s) for (a, b), s in naive_ttest(token_lists).items()]
    items.sort(key=functools.cmp_to_key(cmp))
    return [t for t, _ in items[:n]]


# --- latent tree brute force -----------------------------------------------

def random_tree_spec(rng, n_nodes, extreme_prob=0.1):
    """Random binary latent tree as plain data.

    Returns ``(nodes, root_marginal, cpts)`` where ``nodes`` is a list of
    ``(id, kind, parent)``.  Words are always leaves.
    """
    nodes = [("h0", "latent", None)]
    latents = ["h0"]
    for k in range(1, n_nodes):
        parent = latents[int(rng.integers(0, len(latents)))]
        if rng.random() < 0.4:
            nid, kind = f"h{k}", "latent"
            latents.append(nid)
        else:
            nid, kind = f"w{k}", "word"
        nodes.append((nid, kind, parent))

    def row():
        p = rng.uniform(0.02, 0.98)
        if rng.random() < extreme_prob:
            p = float(rng.choice([1e-4, 1 - 1e-4]))
        return [1 - p, p]

    root = row()
    cpts = {nid: [row(), row()] for nid, _, par in nodes if par is not None}
    return nodes, root, cpts


def brute_joint(nodes, root_marginal, cpts):
    """All 2^n assignments and their probabilities."""
    ids = [n[0] for n in nodes]
    pos = {k: i for i, k in enumerate(ids)}
    n = len(ids)
    A = (np.arange(2 ** n)[:, None] >> np.arange(n)[None, :]) & 1
    p = np.ones(2 ** n)
    for nid, _, parent in nodes:
        col = A[:, pos[nid]]
        if parent is None:
            p *= np.asarray(root_marginal)[col]
        else:
            t = np.asarray(cpts[nid])
            p *= t[A[:, pos[parent]], col]
    return ids, A, p


def brute_posteriors(nodes, root_marginal, cpts, evidence):
    ids, A, p = brute_joint(nodes, root_marginal, cpts)
    pos = {k: i for i, k in enumerate(ids)}
    mask = np.ones(len(p), dtype=bool)
    for k, v in evidence.items():
        mask &= A[:, pos[k]] == v
    z = p[mask].sum()
    return {nid: float(p[mask & (A[:, pos[nid]] == 1)].sum() / z) for nid, kind, _ in nodes if kind == "latent"}


def brute_pairwise(nodes, root_marginal, cpts, a, b):
    ids, A, p = brute_joint(nodes, root_marginal, cpts)
    pos = {k: i for i, k in enumerate(ids)}
    J = np.zeros((2, 2))
    for x in (0, 1):
        for y in (0, 1):
            J[x, y] = p[(A[:, pos[a]] == x) & (A[:, pos[b]] == y)].sum()
    return J


def brute_mi(J):
    total = 0.0
    pa = [J[0][0] + J[0][1], J[1][0] + J[1][1]]
    pb = [J[0][0] + J[1][0], J[0][1] + J[1][1]]
    for x in (0, 1):
        for y in (0, 1):
            if J[x][y] > 0:
                total += J[x][y] * (math.log(J[x][y] / pa[x]) - math.log(pb[y]))
    return total


# --- coherence -------------------------------------------------------------

def naive_coherence(words, tokens, rows, log=True):
    """Exhaustive pair enumeration over a 0/1 matrix given as nested lists."""
    col = {t: j for j, t in enumerate(tokens)}
    total = 0.0
    for i in range(1, len(words)):
        for j in range(i):
            wi, wj = col[words[i]], col[words[j]]
            df_j = sum(1 for r in rows if r[wj])
            co = sum(1 for r in rows if r[wi] and r[wj])
            ratio = (co + 1) / df_j
            total += math.log(ratio) if log else ratio
    return total


# --- two-state latent class grid search ------------------------------------

def _pareto_front(grid):
    """Grid pairs (a, b) whose (a*b, (1-a)(1-b)) is not dominated."""
    pts = sorted(((a * b, (1 - a) * (1 - b)) for a in grid for b in grid), key=lambda uv: (-uv[0], -uv[1]))
    front, best_v = [], -1.0
    for u, v in pts:
        if v > best_v:
            front.append((u, v))
            best_v = v
    return np.array(front)


def grid_optimum_correlated(n11, n00, resolution=0.01, pareto=True):
    """Best per-row log-likelihood of a 2-member latent class model over a grid.

    The data are two identical binary columns: ``n11`` rows of ``(1, 1)`` and
    ``n00`` rows of ``(0, 0)``.  The five parameters range over
    ``{res, 2 res, ..., 1 - res}``.  The likelihood only depends on each
    state's ``(a b, (1-a)(1-b))`` and increases in both, so with
    ``pareto=True`` dominated pairs are skipped without changing the optimum.
    """
    steps = int(round(1 / resolution))
    grid = [k / steps for k in range(steps + 1)]
    if pareto:
        uv = _pareto_front(grid)
    else:
        uv = np.array([(a * b, (1 - a) * (1 - b)) for a in grid for b in grid])
    u0, v0 = uv[:, 0][:, None], uv[:, 1][:, None]
    u1, v1 = uv[:, 0][None, :], uv[:, 1][None, :]
    best = -np.inf
    for p in grid:
        p11 = (1 - p) * u0 + p * u1
        p00 = (1 - p) * v0 + p * v1
        with np.errstate(divide="ignore"):
            ll = n11 * np.log(p11) + n00 * np.log(p00)
        best = max(best, float(ll.max()))
    return best / (n11 + n00)


# --- planted structures ----------------------------------------------------

def two_planted_pairs(seed, N=2000, noise=0.1):
    """Columns (w0, w1) follow one latent and (w2, w3) an independent one."""
    rng = np.random.default_rng(seed)
    ya = rng.random(N) < 0.5
    yb = rng.random(N) < 0.5
    cols = []
    for y in (ya, ya, yb, yb):
        flip = rng.random(N) < noise
        cols.append((y ^ flip).astype(np.uint8))
    return np.column_stack(cols)


def hierarchical_columns(seed, n_groups=40, group_size=5, n_super=8, N=600):
    """0/1 data from a three-level generative tree (super topic -> group -> words)."""
    rng = np.random.default_rng(seed)
    sup = rng.random((N, n_super)) < 0.3
    cols = []
    for g in range(n_groups):
        parent = sup[:, g % n_super]
        z = np.where(parent, rng.random(N) < 0.8, rng.random(N) < 0.05)
        for _ in range(group_size):
            cols.append(np.where(z, rng.random(N) < 0.7, rng.random(N) < 0.03))
    return np.column_stack(cols).astype(np.uint8)


def all_partitions(items):
    """Every set partition of ``items`` (Bell-number many)."""
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in all_partitions(rest):
        for k in range(len(part)):
            yield part[:k] + [[first] + part[k]] + part[k + 1 :]
        yield [[first]] + part


def powerset_pairs(n):
    return list(itertools.combinations(range(n), 2))
