"""
Coined quantum walks with memory, evolved as U = D C on L^d G.

States live in the vertex-coin basis with index ``v*m + k``.  A coin matrix
``A`` follows the row convention ``C|v,c> = sum_j A[c, j] |v,j>``, so the
coin sub-vector ``u`` at a vertex becomes ``u @ A``.  For the symmetric coins
used on the line (Hadamard and its relabelled variant) this is the ordinary
matrix action.

All stepping functions accept either a single state of shape ``(dim,)`` or a
batch of column states of shape ``(dim, k)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional

import numpy as np
from numpy.typing import NDArray

from .graph import RegularDigraph, cycle_graph, iterated_line_digraph
from .partition import (
    CoinShiftFunction,
    VertexPartition,
    identity_coin_shift,
    out_arc_partition,
    validate_coin_shift,
    validate_vertex_partition,
)

__all__ = [
    "UNITARY_TOL",
    "HADAMARD",
    "SWAPPED_HADAMARD",
    "InvalidWalkError",
    "CoinOperator",
    "CoinedWalk",
    "apply_coin",
    "apply_shift",
    "step",
    "evolve",
    "shift_permutation",
    "build_qwm1",
    "build_qwm2",
    "line_memory_graph",
    "transmit_reflect_partition",
    "qwm1_coin_shift",
    "basis_state",
    "localized_initial_state",
    "position_distribution",
]

UNITARY_TOL = 1e-12

HADAMARD = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=np.complex128) / np.sqrt(2.0)
# Hadamard with both coin labels exchanged: the coin QWM1 uses at (x+1, x)
SWAPPED_HADAMARD = np.array([[-1.0, 1.0], [1.0, 1.0]], dtype=np.complex128) / np.sqrt(2.0)


class InvalidWalkError(ValueError):
    """Raised when a walk's partition, coin shift or coin fails validation."""

    def __init__(self, message: str, reports: Optional[list] = None):
        super().__init__(message)
        self.reports = reports or []


def unitarity_deviation(a: NDArray) -> float:
    """max |A^dagger A - I| over all entries (batched over leading axes)."""
    a = np.asarray(a)
    eye = np.eye(a.shape[-1])
    return float(np.max(np.abs(np.conj(np.swapaxes(a, -1, -2)) @ a - eye)))


@dataclass(frozen=True, eq=False)
class CoinOperator:
    """
    Per-vertex m x m coin matrices.

    ``matrices`` is either one (m, m) matrix shared by all vertices or an
    (n, m, m) table.
    """

    matrices: NDArray[np.complex128]

    def __post_init__(self) -> None:
        a = np.array(self.matrices, dtype=np.complex128)
        if a.ndim not in (2, 3) or a.shape[-1] != a.shape[-2]:
            raise ValueError(f"coin must be (m, m) or (n, m, m), got shape {a.shape}")
        a.setflags(write=False)
        object.__setattr__(self, "matrices", a)

    @property
    def shared(self) -> bool:
        return self.matrices.ndim == 2

    @property
    def m(self) -> int:
        return self.matrices.shape[-1]

    def at(self, v: int) -> NDArray[np.complex128]:
        return self.matrices if self.shared else self.matrices[v]

    def table(self, n: int) -> NDArray[np.complex128]:
        """The (n, m, m) per-vertex view."""
        if self.shared:
            return np.broadcast_to(self.matrices, (n, self.m, self.m))
        return self.matrices

    def unitarity_deviation(self) -> float:
        return unitarity_deviation(self.matrices)


@dataclass(frozen=True, eq=False)
class CoinedWalk:
    """
    A coined walk on ``graph`` = L^d G.

    ``paths`` (optional) decodes vertices of L^d G into walks in G; it is
    needed only for position distributions.
    """

    graph: RegularDigraph
    partition: VertexPartition
    shift: CoinShiftFunction
    coin: CoinOperator
    paths: Optional[NDArray[np.int64]] = None
    name: str = ""
    _dest: NDArray[np.int64] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        reports = [validate_vertex_partition(self.partition)]
        if reports[0].ok:
            reports.append(validate_coin_shift(self.shift, self.partition))
        bad = [r for r in reports if not r.ok]
        if bad:
            raise InvalidWalkError("\n".join(str(r) for r in bad), bad)
        n, m = self.graph.n_vertices, self.graph.degree
        if self.coin.m != m or (not self.coin.shared and self.coin.matrices.shape[0] != n):
            raise InvalidWalkError(f"coin shape {self.coin.matrices.shape} does not fit n={n}, m={m}")
        dev = self.coin.unitarity_deviation()
        if dev > UNITARY_TOL:
            raise InvalidWalkError(f"coin is not unitary (deviation {dev:.3e})")
        object.__setattr__(self, "_dest", shift_permutation(self.partition, self.shift))

    @property
    def dim(self) -> int:
        return self.graph.n_vertices * self.graph.degree

    @property
    def n_positions(self) -> int:
        return int(self.paths.max()) + 1 if self.paths is not None else self.graph.n_vertices


def shift_permutation(p: VertexPartition, gc: CoinShiftFunction) -> NDArray[np.int64]:
    """Destination basis index of every basis state under D."""
    return (p.successors.T * p.m + gc.table).ravel()


def _check_dim(walk, psi: NDArray) -> None:
    if psi.shape[0] != walk.dim:
        raise ValueError(f"state has dimension {psi.shape[0]}, walk expects {walk.dim}")


def apply_coin(walk: CoinedWalk, psi: NDArray) -> NDArray[np.complex128]:
    _check_dim(walk, psi)
    n, m = walk.graph.n_vertices, walk.graph.degree
    u = np.asarray(psi, dtype=np.complex128).reshape(n, m, -1)
    a = walk.coin.matrices
    if walk.coin.shared:
        out = np.einsum("vck,cj->vjk", u, a)
    else:
        out = np.einsum("vck,vcj->vjk", u, a)
    return out.reshape(psi.shape)


def apply_shift(walk: CoinedWalk, psi: NDArray) -> NDArray[np.complex128]:
    _check_dim(walk, psi)
    out = np.empty_like(psi, dtype=np.complex128)
    out[walk._dest] = psi
    return out


def step(walk: CoinedWalk, psi: NDArray) -> NDArray[np.complex128]:
    return apply_shift(walk, apply_coin(walk, psi))


def evolve(walk, psi: NDArray, steps: int, step_fn=None) -> Iterator[NDArray[np.complex128]]:
    """Yield the state at t = 0, 1, ..., steps."""
    if step_fn is None:
        step_fn = step
    psi = np.asarray(psi, dtype=np.complex128)
    yield psi
    for _ in range(steps):
        psi = step_fn(walk, psi)
        yield psi


def position_distribution(
    psi: NDArray, paths: NDArray[np.int64], m: int, n_positions: Optional[int] = None
) -> NDArray[np.float64]:
    """
    Marginal probability of the walker's current position x_d.

    ``psi`` is indexed ``v*m + k``; this works for both the coin basis and
    the arc basis of L^d G, since in both the leading factor is the vertex v.
    """
    pos = np.asarray(paths)[:, -1]
    if n_positions is None:
        n_positions = int(pos.max()) + 1
    per_vertex = (np.abs(np.asarray(psi).reshape(len(pos), m)) ** 2).sum(axis=1)
    return np.bincount(pos, weights=per_vertex, minlength=n_positions)


def basis_state(dim: int, index: int) -> NDArray[np.complex128]:
    psi = np.zeros(dim, dtype=np.complex128)
    psi[index] = 1.0
    return psi


# --- walks on the line ------------------------------------------------------------


def line_memory_graph(n: int) -> tuple[RegularDigraph, NDArray[np.int64]]:
    """L C_n and its path decoding.  Vertex 2x is (x, x+1), vertex 2x+1 is (x, x-1)."""
    return iterated_line_digraph(cycle_graph(n), 1)


def transmit_reflect_partition(g: RegularDigraph, paths: NDArray[np.int64]) -> VertexPartition:
    """
    Coin 0 continues in the current direction, coin 1 reverses.

    (a, b) -> (b, 2b - a) for coin 0 and (a, b) -> (b, a) for coin 1.
    """
    index = {tuple(p): v for v, p in enumerate(paths.tolist())}
    n_base = int(paths.max()) + 1
    a, b = paths[:, 0], paths[:, 1]
    fwd = (2 * b - a) % n_base
    transmit = [index[(int(x), int(y))] for x, y in zip(b, fwd)]
    reflect = [index[(int(x), int(y))] for x, y in zip(b, a)]
    return VertexPartition(g, np.array([transmit, reflect]))


def _right_moving(paths: NDArray[np.int64]) -> NDArray[np.bool_]:
    n_base = int(paths.max()) + 1
    return (paths[:, 1] - paths[:, 0]) % n_base == 1


def qwm1_coin_shift(paths: NDArray[np.int64]) -> CoinShiftFunction:
    """New coin records the direction of the vertex being left: 0 if (x, x+1), 1 if (x, x-1)."""
    coin = np.where(_right_moving(paths), 0, 1)
    return CoinShiftFunction(np.stack([coin, coin], axis=1))


def _check_line_size(n: int) -> None:
    if n < 4:
        raise ValueError(f"line walks need N >= 4, got {n}")


def build_qwm1(n: int) -> CoinedWalk:
    """
    QWM1 on L C_n: coin 0 steps right, coin 1 steps left, and the new coin
    records the direction just travelled.  Position-dependent coin: Hadamard
    at (x, x+1) vertices, label-swapped Hadamard at (x+1, x) vertices.
    """
    _check_line_size(n)
    g, paths = line_memory_graph(n)
    partition = out_arc_partition(g)
    coins = np.where(_right_moving(paths)[:, None, None], HADAMARD, SWAPPED_HADAMARD)
    return CoinedWalk(g, partition, qwm1_coin_shift(paths), CoinOperator(coins), paths, "qwm1")


def build_qwm2(n: int) -> CoinedWalk:
    """QWM2 on L C_n: transmit/reflect dicycle partition, gc(v, k) = k, Hadamard coin."""
    _check_line_size(n)
    g, paths = line_memory_graph(n)
    partition = transmit_reflect_partition(g, paths)
    return CoinedWalk(g, partition, identity_coin_shift(partition), CoinOperator(HADAMARD), paths, "qwm2")


def localized_initial_state(
    walk: CoinedWalk, amplitudes, x: Optional[int] = None, swap_left: bool = False
) -> NDArray[np.complex128]:
    """
    a|x-1,x,0> + b|x-1,x,1> + a'|x+1,x,0> + b'|x+1,x,1> on L C_n.

    With ``swap_left`` the two coefficients at (x+1, x) trade places, giving
    the QWM2 counterpart of a QWM1 initial state.
    """
    if walk.paths is None or walk.paths.shape[1] != 2:
        raise ValueError("localized initial states need a 1-memory walk with path decoding")
    a, b, a2, b2 = (complex(z) for z in amplitudes)
    if swap_left:
        a2, b2 = b2, a2
    n_base = walk.n_positions
    if x is None:
        x = n_base // 2
    index = {tuple(p): v for v, p in enumerate(walk.paths.tolist())}
    left = index[((x - 1) % n_base, x % n_base)]
    right = index[((x + 1) % n_base, x % n_base)]
    psi = np.zeros(walk.dim, dtype=np.complex128)
    m = walk.graph.degree
    psi[left * m : left * m + 2] = a, b
    psi[right * m : right * m + 2] = a2, b2
    return psi
