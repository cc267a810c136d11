"""
Combinatorial controls of the two walk forms.

* ``VertexPartition``: m successor maps, one per coin; coin k sends vertex v
  along the arc (v, successors[k, v]).
* ``CoinShiftFunction``: the table gc[v, k] giving the coin a walker carries
  after leaving v with coin k.
* ``ArcSuccessor``: an arc permutation ``next`` with head/tail chaining; its
  cycles are the classes of an edge dicycle partition.

Coins are 0-based throughout: coin index ``k`` stands for the coin usually
written ``c_{k+1}``.  On a 2-regular line digraph, coin 0 is the "1"/transmit coin
and coin 1 the "-1"/reflect coin.

Validators never raise on a bad structure; they return a ``ValidationReport``
listing every violation found.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from .graph import RegularDigraph

__all__ = [
    "Violation",
    "ValidationReport",
    "VertexPartition",
    "CoinShiftFunction",
    "ArcSuccessor",
    "validate_vertex_partition",
    "is_dicycle_partition",
    "validate_coin_shift",
    "validate_arc_successor",
    "cycles_of",
    "out_arc_partition",
    "ordered_coin_shift",
    "identity_coin_shift",
]


@dataclass(frozen=True)
class Violation:
    kind: str
    vertex: int
    detail: str

    def __str__(self) -> str:
        return f"{self.kind} at {self.vertex}: {self.detail}"


@dataclass
class ValidationReport:
    subject: str
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, kind: str, vertex: int, detail: str) -> None:
        self.violations.append(Violation(kind, int(vertex), detail))

    def vertices(self) -> list[int]:
        return sorted({v.vertex for v in self.violations})

    def to_dict(self) -> dict:
        return {
            "subject": self.subject,
            "valid": self.ok,
            "violations": [
                {"kind": v.kind, "vertex": v.vertex, "detail": v.detail} for v in self.violations
            ],
        }

    def __str__(self) -> str:
        if self.ok:
            return f"{self.subject}: valid"
        lines = [f"{self.subject}: {len(self.violations)} violation(s)"]
        lines += [f"  {v}" for v in self.violations]
        return "\n".join(lines)


@dataclass(frozen=True, eq=False)
class VertexPartition:
    """
    Partition of the arcs of ``graph`` into m out-degree-1 sub-digraphs.

    ``successors[k, v]`` is the vertex reached from v inside class k.
    """

    graph: RegularDigraph
    successors: NDArray[np.int64]

    def __post_init__(self) -> None:
        succ = np.array(self.successors, dtype=np.int64)
        if succ.shape != (self.graph.degree, self.graph.n_vertices):
            raise ValueError(
                f"successors must have shape (m, n) = {(self.graph.degree, self.graph.n_vertices)}, "
                f"got {succ.shape}"
            )
        succ.setflags(write=False)
        object.__setattr__(self, "successors", succ)

    @property
    def m(self) -> int:
        return self.successors.shape[0]

    def arc_positions(self) -> NDArray[np.int64]:
        """
        ``pos[v, k]`` = position among v's out-arcs of the arc taken by coin k.

        Entries are -1 where (v, successors[k, v]) is not an arc.
        """
        heads = self.graph.heads
        match = heads[:, None, :] == self.successors.T[:, :, None]
        pos = np.where(match.any(axis=2), match.argmax(axis=2), -1)
        return pos

    def arc_indices(self) -> NDArray[np.int64]:
        """Arc index taken by coin k at v, shape (n, m); requires a valid partition."""
        pos = self.arc_positions()
        if (pos < 0).any():
            raise ValueError("partition uses a non-arc; validate it first")
        return np.arange(self.graph.n_vertices)[:, None] * self.graph.degree + pos


@dataclass(frozen=True, eq=False)
class CoinShiftFunction:
    """``table[v, k]`` is the coin after leaving v with coin k."""

    table: NDArray[np.int64]

    def __post_init__(self) -> None:
        t = np.array(self.table, dtype=np.int64)
        if t.ndim != 2:
            raise ValueError(f"gc table must be 2-d (n, m), got shape {t.shape}")
        t.setflags(write=False)
        object.__setattr__(self, "table", t)

    def __call__(self, v: int, k: int) -> int:
        return int(self.table[v, k])


@dataclass(frozen=True, eq=False)
class ArcSuccessor:
    """The arc bijection: arc a is followed by arc ``next[a]``."""

    graph: RegularDigraph
    next: NDArray[np.int64]

    def __post_init__(self) -> None:
        nxt = np.array(self.next, dtype=np.int64)
        if nxt.shape != (self.graph.n_arcs,):
            raise ValueError(f"next must have length {self.graph.n_arcs}, got shape {nxt.shape}")
        nxt.setflags(write=False)
        object.__setattr__(self, "next", nxt)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ArcSuccessor):
            return NotImplemented
        return np.array_equal(self.next, other.next) and np.array_equal(
            self.graph.heads, other.graph.heads
        )

    __hash__ = None  # type: ignore[assignment]


def validate_vertex_partition(p: VertexPartition) -> ValidationReport:
    """Check that every class gives each vertex one out-arc and the classes split E."""
    report = ValidationReport("partition")
    pos = p.arc_positions()
    for v, k in zip(*np.nonzero(pos < 0)):
        report.add("not-an-arc", v, f"coin {k} leads to {p.successors[k, v]}, which is not an out-neighbor")
    for v in range(p.graph.n_vertices):
        seen: dict[int, int] = {}
        for k in range(p.m):
            if pos[v, k] < 0:
                continue
            j = int(pos[v, k])
            if j in seen:
                report.add(
                    "shared-arc", v,
                    f"coins {seen[j]} and {k} both use arc ({v}, {p.successors[k, v]})",
                )
            else:
                seen[j] = k
        if len(seen) < p.m and not any(x.vertex == v for x in report.violations):
            report.add("uncovered-arc", v, "out-arcs not exhausted by the classes")
    return report


def is_dicycle_partition(p: VertexPartition) -> list[bool]:
    """Per class: True iff every vertex also has in-degree 1 inside it."""
    n = p.graph.n_vertices
    return [bool(np.all(np.bincount(p.successors[k], minlength=n) == 1)) for k in range(p.m)]


def validate_coin_shift(gc: CoinShiftFunction, p: VertexPartition) -> ValidationReport:
    """
    Check the multiset constraint on gc.

    For every vertex v, the coins gc(u, k) over all (u, k) with
    successors[k, u] == v must be exactly {0, ..., m-1}.
    """
    report = ValidationReport("coin shift")
    n, m = p.graph.n_vertices, p.m
    if gc.table.shape != (n, m):
        report.add("shape", -1, f"gc table has shape {gc.table.shape}, expected {(n, m)}")
        return report
    out_of_range = (gc.table < 0) | (gc.table >= m)
    for u, k in zip(*np.nonzero(out_of_range)):
        report.add("coin-range", u, f"gc({u}, {k}) = {gc.table[u, k]} is not a coin index")
    incoming: list[list[int]] = [[] for _ in range(n)]
    sources: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for k in range(m):
        for u in range(n):
            incoming[p.successors[k, u]].append(int(gc.table[u, k]))
            sources[p.successors[k, u]].append((u, k))
    want = Counter(range(m))
    for v in range(n):
        got = Counter(incoming[v])
        if got != want:
            via = ", ".join(f"gc({u}, {k})" for u, k in sorted(sources[v]))
            report.add(
                "multiset", v,
                f"incoming coins {sorted(incoming[v])} != {list(range(m))} (from {via})",
            )
    return report


def validate_arc_successor(f: ArcSuccessor) -> ValidationReport:
    """Check that f is a permutation of the arcs and that f(a) starts where a ends."""
    report = ValidationReport("arc successor")
    g = f.graph
    n_arcs = g.n_arcs
    m = g.degree
    nxt = f.next
    in_range = (nxt >= 0) & (nxt < n_arcs)
    for a in np.flatnonzero(~in_range):
        report.add("arc-range", int(a) // m, f"next[{a}] = {nxt[a]} is not an arc")
    counts = np.bincount(nxt[in_range], minlength=n_arcs)
    for b in np.flatnonzero(counts > 1):
        srcs = np.flatnonzero(nxt == b).tolist()
        report.add("not-injective", int(b) // m, f"arcs {srcs} all map to arc {b}")
    heads = g.heads.ravel()
    tails_of_next = np.where(in_range, nxt, 0) // m
    for a in np.flatnonzero(in_range & (tails_of_next != heads)):
        report.add(
            "chaining", int(heads[a]),
            f"arc {a} = ({a // m}, {heads[a]}) is followed by arc {nxt[a]} with tail {tails_of_next[a]}",
        )
    return report


def cycles_of(f: ArcSuccessor) -> list[list[int]]:
    """Cycle decomposition of the arc permutation, each cycle starting at its smallest arc."""
    seen = np.zeros(f.graph.n_arcs, dtype=bool)
    cycles = []
    for start in range(f.graph.n_arcs):
        if seen[start]:
            continue
        cyc = []
        a = start
        while not seen[a]:
            seen[a] = True
            cyc.append(a)
            a = int(f.next[a])
        cycles.append(cyc)
    return cycles


def out_arc_partition(g: RegularDigraph) -> VertexPartition:
    """Partition where coin k follows the k-th out-arc of every vertex."""
    return VertexPartition(g, g.heads.T.copy())


def identity_coin_shift(p: VertexPartition) -> CoinShiftFunction:
    """gc(v, k) = k; satisfies the constraint exactly when p is a dicycle partition."""
    return CoinShiftFunction(np.tile(np.arange(p.m), (p.graph.n_vertices, 1)))


def ordered_coin_shift(p: VertexPartition) -> CoinShiftFunction:
    """
    A gc satisfying the multiset constraint for any valid partition.

    The m (source, coin) pairs arriving at each vertex receive coins
    0..m-1 in increasing order of source arc index.
    """
    n, m = p.graph.n_vertices, p.m
    table = np.empty((n, m), dtype=np.int64)
    arrivals: list[list[tuple[int, int, int]]] = [[] for _ in range(n)]
    arc_idx = p.arc_indices()
    for u in range(n):
        for k in range(m):
            arrivals[p.successors[k, u]].append((int(arc_idx[u, k]), u, k))
    for v in range(n):
        for c, (_, u, k) in enumerate(sorted(arrivals[v])):
            table[u, k] = c
    return CoinShiftFunction(table)
