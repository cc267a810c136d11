"""
Shared fixtures and independent oracles.

The oracles here are deliberately naive: explicit loops over definitions,
no reuse of the vectorized paths in the package.
"""

import itertools

import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20261017)


def brute_line_digraph_arcs(arcs):
    """Arcs of L G by the rule ((a,b),(c,d)) is an arc iff b == c, as index pairs."""
    out = []
    for i, (a, b) in enumerate(arcs):
        for j, (c, d) in enumerate(arcs):
            if b == c:
                out.append((i, j))
    return out


def brute_paths(heads, d):
    """All length-d walks in the digraph given by ``heads``, enumerated directly."""
    n = len(heads)
    walks = [(v,) for v in range(n)]
    for _ in range(d):
        walks = [w + (int(x),) for w in walks for x in heads[w[-1]]]
    return walks


def dense_coined_oracle(walk):
    """U = D C assembled entry by entry from the definitions."""
    n, m = walk.graph.n_vertices, walk.graph.degree
    dim = n * m
    c = np.zeros((dim, dim), dtype=complex)
    for v in range(n):
        a = walk.coin.at(v)
        for cc, j in itertools.product(range(m), range(m)):
            # C|v,c> = sum_j A[c, j] |v, j>
            c[v * m + j, v * m + cc] += a[cc, j]
    d = np.zeros((dim, dim))
    for v in range(n):
        for j in range(m):
            w = walk.partition.successors[j, v]
            d[w * m + walk.shift.table[v, j], v * m + j] = 1
    return d @ c


def dense_szegedy_oracle(walk):
    """U = S R with R = 2 sum_v |psi_v><psi_v| - I built from outer products."""
    g = walk.graph
    n, m = g.n_vertices, g.degree
    dim = n * m
    r = -np.eye(dim, dtype=complex)
    for v in range(n):
        if v in walk.overrides:
            r[v * m:(v + 1) * m, v * m:(v + 1) * m] = walk.overrides[v]
            continue
        psi = np.zeros(dim, dtype=complex)
        psi[v * m:(v + 1) * m] = walk.amplitudes.alpha[v]
        r += 2 * np.outer(psi, psi.conj())
    s = np.zeros((dim, dim))
    for a in range(dim):
        s[walk.successor.next[a], a] = 1
    return s @ r
