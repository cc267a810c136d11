"""
Szegedy quantum walks with memory, evolved as U = S R on the arc space of L^d G.

Arc ``v*m + k`` is the k-th out-arc of v, so the arc basis has the same
``(vertex, slot)`` layout as the coin basis.  R acts block-diagonally over
tail vertices: the block at v is ``2 a a^dagger - I`` built from the
transition amplitudes ``a = alpha[v]``, unless an explicit block override
is supplied for v (used when a non-reflection coin is carried over from a
coined walk).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional

import numpy as np
from numpy.typing import NDArray

from .graph import RegularDigraph
from .partition import ArcSuccessor, validate_arc_successor

__all__ = [
    "NORM_TOL",
    "TransitionAmplitudes",
    "SzegedyWalk",
    "apply_reflection",
    "apply_arc_shift",
    "step",
    "reflection_blocks",
    "r_squared_check",
]

NORM_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class TransitionAmplitudes:
    """
    Complex amplitudes ``alpha[v, k]`` over the out-arcs of each vertex.

    Use :meth:`from_probabilities` for the real case alpha = sqrt(q).
    """

    alpha: NDArray[np.complex128]

    def __post_init__(self) -> None:
        a = np.array(self.alpha, dtype=np.complex128)
        if a.ndim != 2:
            raise ValueError(f"amplitudes must be (n, m), got shape {a.shape}")
        a.setflags(write=False)
        object.__setattr__(self, "alpha", a)

    @classmethod
    def from_probabilities(cls, graph: RegularDigraph, q) -> TransitionAmplitudes:
        """
        ``q`` is either an (n, m) array over out-arcs or a full (n, n)
        transition matrix; the latter must vanish off the arcs of ``graph``.
        """
        q = np.asarray(q, dtype=np.float64)
        n, m = graph.n_vertices, graph.degree
        if q.shape == (n, n):
            off = q * (1 - graph.adjacency())
            if np.any(off != 0):
                v, w = np.argwhere(off != 0)[0]
                raise ValueError(f"q[{v}, {w}] = {q[v, w]} but ({v}, {w}) is not an arc")
            q = np.take_along_axis(q, graph.heads, axis=1)
        if q.shape != (n, m):
            raise ValueError(f"q must be (n, m) or (n, n), got shape {q.shape}")
        if np.any(q < 0):
            raise ValueError("transition probabilities must be nonnegative")
        return cls(np.sqrt(q))

    @classmethod
    def uniform(cls, graph: RegularDigraph) -> TransitionAmplitudes:
        n, m = graph.n_vertices, graph.degree
        return cls(np.full((n, m), 1 / np.sqrt(m)))

    def norm_deviation(self) -> float:
        return float(np.max(np.abs((np.abs(self.alpha) ** 2).sum(axis=1) - 1)))


@dataclass(frozen=True, eq=False)
class SzegedyWalk:
    """
    A Szegedy walk on ``graph`` = L^d G.

    ``overrides`` maps a vertex to an explicit m x m block acting on its
    out-arc amplitudes (column convention), replacing ``2 a a^dagger - I``.
    Set ``check=False`` to build a walk with unnormalized amplitudes, e.g.
    to probe the reflection identity.
    """

    graph: RegularDigraph
    successor: ArcSuccessor
    amplitudes: TransitionAmplitudes
    overrides: Mapping[int, NDArray[np.complex128]] = field(default_factory=dict)
    paths: Optional[NDArray[np.int64]] = None
    name: str = ""
    check: bool = True

    def __post_init__(self) -> None:
        n, m = self.graph.n_vertices, self.graph.degree
        if self.amplitudes.alpha.shape != (n, m):
            raise ValueError(f"amplitudes have shape {self.amplitudes.alpha.shape}, expected {(n, m)}")
        if self.check:
            report = validate_arc_successor(self.successor)
            if not report.ok:
                raise ValueError(str(report))
            bad = np.abs((np.abs(self.amplitudes.alpha) ** 2).sum(axis=1) - 1) > NORM_TOL
            bad[list(self.overrides)] = False
            if bad.any():
                raise ValueError(f"amplitudes at vertex {int(np.argmax(bad))} are not normalized")
        object.__setattr__(
            self, "overrides", {int(v): np.asarray(b, dtype=np.complex128) for v, b in self.overrides.items()}
        )

    @property
    def dim(self) -> int:
        return self.graph.n_arcs

    @property
    def n_positions(self) -> int:
        return int(self.paths.max()) + 1 if self.paths is not None else self.graph.n_vertices


def reflection_blocks(walk: SzegedyWalk) -> NDArray[np.complex128]:
    """The (n, m, m) blocks of R, column convention."""
    a = walk.amplitudes.alpha
    m = a.shape[1]
    blocks = 2 * a[:, :, None] * np.conj(a)[:, None, :] - np.eye(m)
    for v, b in walk.overrides.items():
        blocks[v] = b
    return blocks


def _check_dim(walk: SzegedyWalk, psi: NDArray) -> None:
    if psi.shape[0] != walk.dim:
        raise ValueError(f"state has dimension {psi.shape[0]}, walk expects {walk.dim}")


def apply_reflection(walk: SzegedyWalk, psi: NDArray) -> NDArray[np.complex128]:
    _check_dim(walk, psi)
    n, m = walk.graph.n_vertices, walk.graph.degree
    u = np.asarray(psi, dtype=np.complex128).reshape(n, m, -1)
    a = walk.amplitudes.alpha
    overlap = np.einsum("vk,vkb->vb", np.conj(a), u)
    out = 2 * a[:, :, None] * overlap[:, None, :] - u
    for v, block in walk.overrides.items():
        out[v] = block @ u[v]
    return out.reshape(psi.shape)


def apply_arc_shift(walk: SzegedyWalk, psi: NDArray) -> NDArray[np.complex128]:
    _check_dim(walk, psi)
    out = np.empty_like(psi, dtype=np.complex128)
    out[walk.successor.next] = psi
    return out


def step(walk: SzegedyWalk, psi: NDArray) -> NDArray[np.complex128]:
    return apply_arc_shift(walk, apply_reflection(walk, psi))


def r_squared_check(walk: SzegedyWalk) -> float:
    """max |R^2 - I| entry, computed by sweeping R over the arc basis block by block."""
    n, m = walk.graph.n_vertices, walk.graph.degree
    worst = 0.0
    # R is block-diagonal by tail vertex; sweep the basis in chunks of whole blocks
    chunk = max(1, 512 // m)
    for start in range(0, n, chunk):
        lo, hi = start * m, min(n, start + chunk) * m
        basis = np.zeros((walk.dim, hi - lo), dtype=np.complex128)
        basis[np.arange(lo, hi), np.arange(hi - lo)] = 1.0
        twice = apply_reflection(walk, apply_reflection(walk, basis))
        worst = max(worst, float(np.max(np.abs(twice - basis))))
    return worst
