"""
Regular digraphs and iterated line digraphs.

A ``RegularDigraph`` stores its arcs in tail-major order: arc ``v*m + k`` is
the ``k``-th out-arc of vertex ``v``.  This ordering is preserved by
``line_digraph`` (vertex ``a`` of L G is arc ``a`` of G, and the out-arcs of
``a`` follow the out-arc order at its head), which gives every iterated line
digraph a deterministic labeling.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from numpy.typing import NDArray

__all__ = [
    "GraphError",
    "ResourceLimitError",
    "RegularDigraph",
    "line_digraph",
    "iterated_line_digraph",
    "arc_paths",
    "cycle_graph",
    "directed_cycle",
    "is_cycle_graph",
    "DEFAULT_VERTEX_CAP",
]

DEFAULT_VERTEX_CAP = 10**6


class GraphError(ValueError):
    """Raised when a digraph violates the regularity or simplicity rules."""


class ResourceLimitError(RuntimeError):
    """Raised when a construction would exceed a configured size cap."""


@dataclass(frozen=True, eq=False)
class RegularDigraph:
    """
    An m-out-regular, m-in-regular simple digraph.

    Attributes
    ----------
    heads : ndarray of int, shape (n, m)
        ``heads[v, k]`` is the head of the k-th out-arc of ``v``.  The arc
        index of that arc is ``v*m + k``.
    labels : tuple of str
        Display label per vertex.
    """

    heads: NDArray[np.int64]
    labels: tuple = field(default=())
    in_arcs: NDArray[np.int64] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        heads = np.array(self.heads, dtype=np.int64)
        if heads.ndim != 2 or heads.shape[0] == 0 or heads.shape[1] == 0:
            raise GraphError(f"heads must be a non-empty (n, m) array, got shape {heads.shape}")
        n, m = heads.shape
        if heads.min() < 0 or heads.max() >= n:
            raise GraphError("arc head out of vertex range")
        tails = np.repeat(np.arange(n), m)
        loops = np.flatnonzero(heads.ravel() == tails)
        if loops.size:
            raise GraphError(f"self-loop at vertex {tails[loops[0]]}")
        srt = np.sort(heads, axis=1)
        dup = np.flatnonzero((srt[:, 1:] == srt[:, :-1]).any(axis=1))
        if dup.size:
            raise GraphError(f"parallel arcs out of vertex {dup[0]}")
        indeg = np.bincount(heads.ravel(), minlength=n)
        bad = np.flatnonzero(indeg != m)
        if bad.size:
            raise GraphError(f"vertex {bad[0]} has in-degree {indeg[bad[0]]}, expected {m}")
        heads.setflags(write=False)
        # stable sort keeps in-arcs of each vertex in increasing arc order
        in_arcs = np.argsort(heads.ravel(), kind="stable").reshape(n, m)
        in_arcs.setflags(write=False)
        labels = tuple(self.labels) if len(self.labels) else tuple(str(v) for v in range(n))
        if len(labels) != n:
            raise GraphError(f"expected {n} labels, got {len(labels)}")
        object.__setattr__(self, "heads", heads)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "in_arcs", in_arcs)

    @property
    def n_vertices(self) -> int:
        return self.heads.shape[0]

    @property
    def degree(self) -> int:
        return self.heads.shape[1]

    @property
    def n_arcs(self) -> int:
        return self.heads.size

    @property
    def tails(self) -> NDArray[np.int64]:
        """Tail of every arc, in arc order."""
        return np.repeat(np.arange(self.n_vertices), self.degree)

    def arcs(self) -> list[tuple[int, int]]:
        return list(zip(self.tails.tolist(), self.heads.ravel().tolist()))

    def out_neighbors(self, v: int) -> NDArray[np.int64]:
        return self.heads[v]

    def out_arcs(self, v: int) -> range:
        m = self.degree
        return range(v * m, (v + 1) * m)

    def arc_index(self, tail: int, head: int) -> int:
        """Index of arc (tail, head); raises KeyError if it is not an arc."""
        hit = np.flatnonzero(self.heads[tail] == head)
        if not hit.size:
            raise KeyError(f"({tail}, {head}) is not an arc")
        return tail * self.degree + int(hit[0])

    def out_position(self) -> dict:
        """Map (tail, head) -> position of that arc among the tail's out-arcs."""
        return {(v, int(w)): k for v in range(self.n_vertices) for k, w in enumerate(self.heads[v])}

    def adjacency(self) -> NDArray[np.int64]:
        a = np.zeros((self.n_vertices, self.n_vertices), dtype=np.int64)
        a[self.tails, self.heads.ravel()] = 1
        return a

    @classmethod
    def from_arcs(cls, n: int, arcs: Sequence[tuple[int, int]], labels: Sequence[str] = ()) -> RegularDigraph:
        """Build from an arc list; arcs are grouped by tail keeping their relative order."""
        out: list[list[int]] = [[] for _ in range(n)]
        for a, b in arcs:
            out[a].append(b)
        degrees = {len(o) for o in out}
        if len(degrees) != 1:
            raise GraphError(f"out-degrees differ: {sorted(degrees)}")
        return cls(np.array(out, dtype=np.int64), tuple(labels))


def line_digraph(g: RegularDigraph) -> RegularDigraph:
    """Return L G: vertex a is arc a of g, with arcs (a, b) -> (b, c)."""
    m = g.degree
    heads_lg = g.heads.ravel()[:, None] * m + np.arange(m)[None, :]
    tails = g.tails
    hd = g.heads.ravel()
    labels = tuple(f"{g.labels[t]},{g.labels[h]}" for t, h in zip(tails, hd))
    return RegularDigraph(heads_lg, labels)


def iterated_line_digraph(
    g: RegularDigraph, d: int, *, cap: int = DEFAULT_VERTEX_CAP
) -> tuple[RegularDigraph, NDArray[np.int64]]:
    """
    Build L^d G together with the path decoding of its vertices.

    Returns
    -------
    graph : RegularDigraph
        L^d G with ``n * m**d`` vertices.
    paths : ndarray of int, shape (n * m**d, d + 1)
        ``paths[v]`` is the walk (x_0, ..., x_d) in G encoded by vertex v.
        The walker's current position is ``paths[v, -1]``.
    """
    if d < 1:
        raise ValueError(f"memory depth must be >= 1, got {d}")
    size = g.n_vertices * g.degree**d
    if size > cap:
        raise ResourceLimitError(f"L^{d} G would have {size} vertices (cap {cap})")
    paths = np.arange(g.n_vertices)[:, None]
    cur = g
    for _ in range(d):
        # vertex a of the next graph is arc a = (tail, head) of cur
        tails, heads = cur.tails, cur.heads.ravel()
        paths = np.hstack([paths[tails], paths[heads][:, -1:]])
        cur = line_digraph(cur)
    base = np.array(g.labels)
    labels = tuple(",".join(row) for row in base[paths])
    cur = RegularDigraph(cur.heads, labels)
    paths.setflags(write=False)
    return cur, paths


def arc_paths(graph: RegularDigraph, paths: NDArray[np.int64]) -> NDArray[np.int64]:
    """Walks of length d+1 in G encoded by the arcs of L^d G, in arc order."""
    return np.hstack([paths[graph.tails], paths[graph.heads.ravel()][:, -1:]])


def cycle_graph(n: int) -> RegularDigraph:
    """C_n as a symmetric 2-regular digraph; arc (x, x+1) precedes (x, x-1)."""
    if n < 3:
        raise GraphError(f"cycle needs at least 3 vertices, got {n}")
    x = np.arange(n)
    return RegularDigraph(np.stack([(x + 1) % n, (x - 1) % n], axis=1))


def directed_cycle(n: int) -> RegularDigraph:
    """The 1-regular directed cycle 0 -> 1 -> ... -> n-1 -> 0."""
    if n < 2:
        raise GraphError(f"directed cycle needs at least 2 vertices, got {n}")
    return RegularDigraph(((np.arange(n) + 1) % n)[:, None])


def is_cycle_graph(g: RegularDigraph) -> bool:
    """True if g is exactly ``cycle_graph(g.n_vertices)``."""
    n = g.n_vertices
    return n >= 3 and g.degree == 2 and np.array_equal(g.heads, cycle_graph(n).heads)
