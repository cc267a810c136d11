"""Random instances for property tests and parameter sweeps."""

from __future__ import annotations

import numpy as np
from numpy.typing import NDArray

from .coined import CoinedWalk, CoinOperator
from .graph import GraphError, RegularDigraph, iterated_line_digraph
from .partition import CoinShiftFunction, VertexPartition

__all__ = [
    "random_regular_digraph",
    "random_partition",
    "random_coin_shift",
    "random_unitary",
    "random_unit_vector",
    "random_reflection_coins",
    "random_state",
    "random_coined_walk",
]


def random_regular_digraph(n: int, m: int, rng: np.random.Generator, max_tries: int = 10_000) -> RegularDigraph:
    """
    A uniformly shuffled simple m-regular digraph on n vertices.

    Built as a union of m random permutations without fixed points or
    collisions, by rejection.
    """
    if not 1 <= m < n:
        raise ValueError(f"need 1 <= m < n, got n={n}, m={m}")
    for _ in range(max_tries):
        cols = []
        for _ in range(m):
            for _ in range(max_tries):
                perm = rng.permutation(n)
                if np.any(perm == np.arange(n)):
                    continue
                if any(np.any(perm == c) for c in cols):
                    continue
                cols.append(perm)
                break
            else:
                break
        if len(cols) == m:
            try:
                return RegularDigraph(np.stack(cols, axis=1))
            except GraphError:
                continue
    raise RuntimeError(f"could not sample a simple {m}-regular digraph on {n} vertices")


def random_partition(g: RegularDigraph, rng: np.random.Generator) -> VertexPartition:
    """Assign the out-arcs of each vertex to the m coins by a random permutation."""
    order = np.array([rng.permutation(g.degree) for _ in range(g.n_vertices)])
    succ = np.take_along_axis(g.heads, order, axis=1)
    return VertexPartition(g, succ.T.copy())


def random_coin_shift(p: VertexPartition, rng: np.random.Generator) -> CoinShiftFunction:
    """A random gc satisfying the multiset constraint: arrivals at each vertex get a random coin permutation."""
    n, m = p.graph.n_vertices, p.m
    table = np.empty((n, m), dtype=np.int64)
    arrivals: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for u in range(n):
        for k in range(m):
            arrivals[p.successors[k, u]].append((u, k))
    for v in range(n):
        for (u, k), c in zip(arrivals[v], rng.permutation(m)):
            table[u, k] = c
    return CoinShiftFunction(table)


def random_unitary(m: int, rng: np.random.Generator) -> NDArray[np.complex128]:
    """Haar-random unitary via QR with phase correction."""
    z = (rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_unit_vector(m: int, rng: np.random.Generator, size=None) -> NDArray[np.complex128]:
    shape = (m,) if size is None else (*np.atleast_1d(size), m)
    z = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    return z / np.linalg.norm(z, axis=-1, keepdims=True)


def random_reflection_coins(n: int, m: int, rng: np.random.Generator) -> NDArray[np.complex128]:
    """(n, m, m) coins A = 2 conj(a) a^T - I for random unit vectors a."""
    a = random_unit_vector(m, rng, n)
    return 2 * np.conj(a)[:, :, None] * a[:, None, :] - np.eye(m)


def random_state(dim: int, rng: np.random.Generator) -> NDArray[np.complex128]:
    return random_unit_vector(dim, rng)


def random_coined_walk(
    n: int,
    m: int,
    rng: np.random.Generator,
    *,
    depth: int = 1,
    coin: str = "unitary",
    graph: RegularDigraph | None = None,
) -> CoinedWalk:
    """
    A random valid coined walk with ``depth`` steps of memory on a random
    m-regular digraph (or on ``graph``).  ``depth=0`` walks the base graph.

    ``coin`` is ``"unitary"`` (independent Haar coins per vertex) or
    ``"reflection"`` (per-vertex coins of the form 2 conj(a) a^T - I).
    """
    base = graph if graph is not None else random_regular_digraph(n, m, rng)
    if depth:
        g, paths = iterated_line_digraph(base, depth)
    else:
        g, paths = base, np.arange(base.n_vertices)[:, None]
    p = random_partition(g, rng)
    gc = random_coin_shift(p, rng)
    if coin == "unitary":
        coins = np.array([random_unitary(g.degree, rng) for _ in range(g.n_vertices)])
    elif coin == "reflection":
        coins = random_reflection_coins(g.n_vertices, g.degree, rng)
    else:
        raise ValueError(f"unknown coin kind {coin!r}")
    return CoinedWalk(g, p, gc, CoinOperator(coins), paths, f"random-{coin}")
