"""Independent reference implementations used as test oracles.

Everything here works on plain Python sets and dense matrices so that it
shares no code path with the package under test.
"""

from __future__ import annotations

import itertools
from collections import Counter, defaultdict
from fractions import Fraction

import numpy as np

from degtri import Graph


def er_edges(n: int, p: float, seed: int) -> list[tuple[int, int]]:
    """G(n, p) edge list from a fixed seed, one coin per unordered pair."""
    rng = np.random.default_rng(seed)
    coins = rng.random(n * (n - 1) // 2)
    pairs = itertools.combinations(range(n), 2)
    return [uv for uv, c in zip(pairs, coins) if c < p]


def er_graph(n: int, p: float, seed: int) -> Graph:
    edges = er_edges(n, p, seed)
    src = [u for u, _ in edges]
    dst = [v for _, v in edges]
    return Graph.from_edges(n, src, dst)


def adjacency_matrix(g: Graph) -> np.ndarray:
    a = np.zeros((g.node_count, g.node_count), dtype=bool)
    for u in range(g.node_count):
        a[u, g.neighbors(u)] = True
    return a


def brute_triangles(g: Graph) -> list[tuple[int, int, int]]:
    a = adjacency_matrix(g)
    return [(i, j, k) for i, j, k in itertools.combinations(range(g.node_count), 3)
            if a[i, j] and a[i, k] and a[j, k]]


def brute_per_node(g: Graph, tris) -> list[int]:
    t = [0] * g.node_count
    for tri in tris:
        for v in tri:
            t[v] += 1
    return t


def degree_triples(g: Graph, tris) -> list[tuple[int, int, int]]:
    deg = [len(g.neighbors(u)) for u in range(g.node_count)]
    return [tuple(sorted(deg[v] for v in tri)) for tri in tris]


def brute_buckets(triples) -> dict[int, tuple[int, int, int, int]]:
    """i -> (size, D1, D2, D3) with the lower median (rank ceil(k/2))."""
    groups = defaultdict(list)
    for t in triples:
        groups[t[0]].append(t)
    out = {}
    for i, ts in groups.items():
        k = len(ts)
        r = (k + 1) // 2 - 1
        out[i] = (k, sorted(t[0] for t in ts)[r], sorted(t[1] for t in ts)[r],
                  sorted(t[2] for t in ts)[r])
    return out


def brute_ratios(triples) -> tuple[Fraction, Fraction, Fraction]:
    n = len(triples)
    r21 = sum(Fraction(b, a) for a, b, _ in triples) / n
    r31 = sum(Fraction(c, a) for a, _, c in triples) / n
    r32 = sum(Fraction(c, b) for _, b, c in triples) / n
    return r21, r31, r32


def brute_local_cc(g: Graph) -> list[float]:
    a = adjacency_matrix(g)
    out = []
    for u in range(g.node_count):
        nb = np.flatnonzero(a[u])
        d = nb.size
        if d < 2:
            out.append(0.0)
            continue
        closed = sum(1 for x, y in itertools.combinations(nb, 2) if a[x, y])
        out.append(closed / (d * (d - 1) / 2))
    return out


def degree_tally(g: Graph) -> Counter:
    a = adjacency_matrix(g)
    return Counter(int(r.sum()) for r in a)


def sample_discrete_powerlaw(alpha: float, n: int, seed: int, xmax: int = 10**6) -> np.ndarray:
    """Inverse-CDF sample from p(x) proportional to x**-alpha on xmin=1..xmax."""
    x = np.arange(1, xmax + 1, dtype=np.float64)
    pmf = x ** -alpha
    cdf = np.cumsum(pmf)
    cdf /= cdf[-1]
    u = np.random.default_rng(seed).random(n)
    return np.searchsorted(cdf, u, side="left") + 1
