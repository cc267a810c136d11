"""
Conversions between coined and Szegedy walks on the same L^d G.

The basis state |v, c_j> of a coined walk is identified with the arc
(v, f'_j(v)) it is about to traverse.  Under that identification the shift
D becomes an arc permutation S, and each coin block becomes an m x m block
acting on the out-arcs of v.  When that block has the form ``2 a a^dagger - I``
the Szegedy walk is expressed through transition amplitudes; otherwise the
block is carried over verbatim as an override.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from numpy.typing import NDArray

from .coined import CoinedWalk, CoinOperator, shift_permutation
from .partition import ArcSuccessor, CoinShiftFunction, VertexPartition, validate_vertex_partition
from .szegedy import SzegedyWalk, TransitionAmplitudes, reflection_blocks

__all__ = [
    "REFLECTION_TOL",
    "CoinNotReflectionForm",
    "Correspondence",
    "BridgeResult",
    "coined_to_szegedy",
    "szegedy_to_coined",
    "map_state",
    "coin_from_reflection",
    "reflection_vector",
    "reflection_coin",
]

REFLECTION_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class Correspondence:
    """Basis bijection: coin basis index i <-> arc index ``coin_to_arc[i]``."""

    coin_to_arc: NDArray[np.int64]
    arc_to_coin: NDArray[np.int64] = field(init=False)

    def __post_init__(self) -> None:
        fwd = np.asarray(self.coin_to_arc, dtype=np.int64)
        inv = np.empty_like(fwd)
        inv[fwd] = np.arange(fwd.size)
        object.__setattr__(self, "coin_to_arc", fwd)
        object.__setattr__(self, "arc_to_coin", inv)

    @classmethod
    def from_partition(cls, p: VertexPartition) -> Correspondence:
        return cls(p.arc_indices().ravel())

    def slot_of_coin(self, m: int) -> NDArray[np.int64]:
        """``pos[v, j]``: out-arc slot at v that coin j corresponds to."""
        return (self.coin_to_arc % m).reshape(-1, m)


@dataclass
class BridgeResult:
    walk: SzegedyWalk
    correspondence: Correspondence
    non_reflection_vertices: list[int]

    @property
    def exact(self) -> bool:
        """True when every coin block is of reflection form."""
        return not self.non_reflection_vertices


class CoinNotReflectionForm(ValueError):
    """
    Raised when some coin block is not ``2 a a^dagger - I``.

    The operator-level conversion is still available as ``.result``, with
    the offending blocks carried as overrides.
    """

    def __init__(self, result: BridgeResult):
        vs = result.non_reflection_vertices
        shown = ", ".join(map(str, vs[:8])) + (" ..." if len(vs) > 8 else "")
        super().__init__(f"coin is not of reflection form at {len(vs)} vertex(es): {shown}")
        self.result = result


def reflection_vector(block: NDArray, tol: float = REFLECTION_TOL) -> Optional[NDArray[np.complex128]]:
    """
    Return a unit vector a with ``block == 2 a a^dagger - I``, or None.

    A unitary is of that form iff it is Hermitian, squares to I and has
    trace 2 - m.  The vector is fixed only up to a global phase.
    """
    b = np.asarray(block, dtype=np.complex128)
    m = b.shape[0]
    eye = np.eye(m)
    if np.max(np.abs(b - b.conj().T)) > tol or np.max(np.abs(b @ b - eye)) > tol:
        return None
    if abs(np.trace(b) - (2 - m)) > tol:
        return None
    proj = (b + eye) / 2
    col = int(np.argmax(np.linalg.norm(proj, axis=0)))
    a = proj[:, col]
    return a / np.linalg.norm(a)


def reflection_coin(alpha) -> NDArray[np.complex128]:
    """Coin matrix A[j, k] = 2 conj(alpha_j) alpha_k - delta_jk (row convention)."""
    return coin_from_reflection(alpha)


def coin_from_reflection(alpha, orientation=None) -> NDArray[np.complex128]:
    """
    The coin that realizes the reflection about ``alpha`` at one vertex.

    ``alpha[k]`` is the amplitude on the k-th out-arc; ``orientation[j]`` is
    the out-arc that coin j is attached to (default: coin j <-> arc j).
    Returns A with ``A[j, k] = 2 conj(alpha[o_j]) alpha[o_k] - delta_jk``.
    """
    alpha = np.asarray(alpha, dtype=np.complex128)
    if orientation is not None:
        alpha = alpha[np.asarray(orientation)]
    return 2 * np.outer(np.conj(alpha), alpha) - np.eye(alpha.size)


def coined_to_szegedy(walk: CoinedWalk, *, strict: bool = True) -> BridgeResult:
    """
    Express a coined walk as a Szegedy walk on the arcs of the same graph.

    With ``strict`` (default) a coin that is not of reflection form raises
    :class:`CoinNotReflectionForm`; the exception still carries the
    converted walk.  With ``strict=False`` the result is returned and the
    offending vertices are listed on it.
    """
    g = walk.graph
    n, m = g.n_vertices, g.degree
    corr = Correspondence.from_partition(walk.partition)
    dest = shift_permutation(walk.partition, walk.shift)
    nxt = np.empty(g.n_arcs, dtype=np.int64)
    nxt[corr.coin_to_arc] = corr.coin_to_arc[dest]
    successor = ArcSuccessor(g, nxt)

    pos = corr.slot_of_coin(m)
    coins = walk.coin.table(n)
    alpha = np.full((n, m), 1 / np.sqrt(m), dtype=np.complex128)
    overrides = {}
    bad = []
    cache: dict[bytes, tuple] = {}
    for v in range(n):
        # operator on the coin sub-vector is A^T; move it onto out-arc slots
        op = coins[v].T
        key = op.tobytes() + pos[v].tobytes()
        if key not in cache:
            block = np.empty((m, m), dtype=np.complex128)
            block[np.ix_(pos[v], pos[v])] = op
            cache[key] = (block, reflection_vector(block))
        block, a = cache[key]
        if a is None:
            overrides[v] = block
            bad.append(v)
        else:
            alpha[v] = a
    sz = SzegedyWalk(
        g, successor, TransitionAmplitudes(alpha), overrides, walk.paths, f"{walk.name}-szegedy".lstrip("-")
    )
    result = BridgeResult(sz, corr, bad)
    if bad and strict:
        raise CoinNotReflectionForm(result)
    return result


def szegedy_to_coined(walk: SzegedyWalk, target: VertexPartition) -> CoinedWalk:
    """
    Express a Szegedy walk as a coined walk with partition ``target``.

    The coin shift sends (v, j) to the class of the arc that follows
    (v, f'_j(v)); the coin at v is the reflection block read in the
    coin order of ``target`` at v.
    """
    report = validate_vertex_partition(target)
    if not report.ok:
        raise ValueError(str(report))
    if target.graph is not walk.graph and not np.array_equal(target.graph.heads, walk.graph.heads):
        raise ValueError("target partition is defined on a different graph")
    g = walk.graph
    n, m = g.n_vertices, g.degree
    corr = Correspondence.from_partition(target)
    following = corr.arc_to_coin[walk.successor.next[corr.coin_to_arc]]
    gc = CoinShiftFunction((following % m).reshape(n, m))

    pos = corr.slot_of_coin(m)
    blocks = reflection_blocks(walk)
    idx = np.arange(n)[:, None, None]
    op = blocks[idx, pos[:, :, None], pos[:, None, :]]
    coins = np.swapaxes(op, 1, 2)
    if np.all(np.abs(coins - coins[0]) == 0):
        coin = CoinOperator(coins[0])
    else:
        coin = CoinOperator(coins)
    return CoinedWalk(g, target, gc, coin, walk.paths, f"{walk.name}-coined".lstrip("-"))


def map_state(psi: NDArray, correspondence: Correspondence, target: str) -> NDArray[np.complex128]:
    """
    Relabel a state along the basis bijection.

    ``target="arc"`` maps a coin-basis state into arc space;
    ``target="coin"`` maps an arc-space state back.
    """
    psi = np.asarray(psi, dtype=np.complex128)
    if psi.shape[0] != correspondence.coin_to_arc.size:
        raise ValueError(
            f"state has dimension {psi.shape[0]}, correspondence expects {correspondence.coin_to_arc.size}"
        )
    out = np.empty_like(psi)
    if target == "arc":
        out[correspondence.coin_to_arc] = psi
    elif target == "coin":
        out[correspondence.arc_to_coin] = psi
    else:
        raise ValueError(f"target must be 'arc' or 'coin', got {target!r}")
    return out
