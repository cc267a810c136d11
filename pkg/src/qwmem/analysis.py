"""Experiment-level checks: dense oracles, distribution comparison, moments and the QWM1/QWM2 experiment."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence, Union

import numpy as np
from numpy.typing import NDArray

from . import coined, szegedy
from .coined import CoinedWalk, build_qwm1, build_qwm2, localized_initial_state, position_distribution
from .graph import RegularDigraph, is_cycle_graph
from .szegedy import SzegedyWalk

__all__ = [
    "DEFAULT_BASIS_CAP",
    "OPERATOR_TOL",
    "STATE_TOL",
    "step",
    "distributions",
    "dense_matrix",
    "dense_operator",
    "operator_distance",
    "compare_distributions",
    "EquivalenceReport",
    "qwm_equivalence_experiment",
    "moments",
]

DEFAULT_BASIS_CAP = 4096
OPERATOR_TOL = 1e-12
STATE_TOL = 1e-10

Walk = Union[CoinedWalk, SzegedyWalk]


def step(walk: Walk, psi: NDArray) -> NDArray[np.complex128]:
    if isinstance(walk, SzegedyWalk):
        return szegedy.step(walk, psi)
    return coined.step(walk, psi)


def distributions(walk: Walk, psi0: NDArray, steps: int) -> NDArray[np.float64]:
    """Position distribution at t = 0..steps, shape (steps + 1, n_positions)."""
    if walk.paths is None:
        raise ValueError("walk has no path decoding; positions are undefined")
    m = walk.graph.degree
    rows = []
    psi = np.asarray(psi0, dtype=np.complex128)
    for t in range(steps + 1):
        if t:
            psi = step(walk, psi)
        rows.append(position_distribution(psi, walk.paths, m, walk.n_positions))
    return np.array(rows)


def dense_matrix(walk: Walk, cap: int = DEFAULT_BASIS_CAP) -> NDArray[np.complex128]:
    """Explicit one-step operator, assembled by stepping every basis state."""
    dim = walk.dim
    if dim > cap:
        raise ValueError(f"basis size {dim} exceeds the dense-operator cap {cap}")
    return step(walk, np.eye(dim, dtype=np.complex128))


def dense_operator(walk: Walk, cap: int = DEFAULT_BASIS_CAP) -> tuple[NDArray[np.complex128], float]:
    """
    Explicit one-step operator together with its unitarity deviation
    max |U^dagger U - I|.
    """
    u = dense_matrix(walk, cap)
    dev = float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))
    return u, dev


def operator_distance(a: NDArray, b: NDArray) -> float:
    """max |a e^{i phi} - b| with the phase fixed on a's largest-magnitude entry."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")
    idx = np.unravel_index(np.argmax(np.abs(a)), a.shape)
    phase = 1.0 if abs(b[idx]) == 0 else (b[idx] / abs(b[idx])) / (a[idx] / abs(a[idx]))
    return float(np.max(np.abs(a * phase - b)))


def compare_distributions(p: Sequence[float], q: Sequence[float], tol: float = 1e-8) -> tuple[float, float]:
    """(max-abs difference, total-variation distance)."""
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if p.shape != q.shape:
        raise ValueError(f"length mismatch: {p.shape} vs {q.shape}")
    for name, x in (("p", p), ("q", q)):
        if abs(x.sum() - 1) > tol:
            raise ValueError(f"{name} sums to {x.sum():.12g}, not 1")
    diff = np.abs(p - q)
    return float(diff.max()), float(0.5 * diff.sum())


@dataclass
class EquivalenceReport:
    n: int
    steps: int
    amplitudes: list
    start: int
    max_abs_diff: list[float] = field(default_factory=list)
    tv_distance: list[float] = field(default_factory=list)

    @property
    def worst(self) -> float:
        return max(self.max_abs_diff)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["amplitudes"] = [[z.real, z.imag] for z in map(complex, self.amplitudes)]
        d["worst"] = self.worst
        return d


def qwm_equivalence_experiment(
    n: int, steps: int, amplitudes: Sequence[complex], *, start: Optional[int] = None
) -> EquivalenceReport:
    """
    Evolve QWM1 and QWM2 side by side and compare position distributions.

    QWM1 starts from a|x-1,x,0> + b|x-1,x,1> + a'|x+1,x,0> + b'|x+1,x,1>;
    QWM2 from the same state with a' and b' exchanged.
    """
    amps = [complex(z) for z in amplitudes]
    if len(amps) != 4:
        raise ValueError(f"need four amplitudes (a, b, a', b'), got {len(amps)}")
    norm = sum(abs(z) ** 2 for z in amps)
    if abs(norm - 1) > STATE_TOL:
        raise ValueError(f"amplitudes have squared norm {norm:.12g}, expected 1")
    if n <= 2 * steps + 2:
        raise ValueError(f"N = {n} must exceed 2t + 2 = {2 * steps + 2} to model the line exactly")
    x = n // 2 if start is None else start
    w1, w2 = build_qwm1(n), build_qwm2(n)
    p1 = distributions(w1, localized_initial_state(w1, amps, x), steps)
    p2 = distributions(w2, localized_initial_state(w2, amps, x, swap_left=True), steps)
    report = EquivalenceReport(n, steps, amps, x)
    for a, b in zip(p1, p2):
        mx, tv = compare_distributions(a, b)
        report.max_abs_diff.append(mx)
        report.tv_distance.append(tv)
    return report


def moments(p: Sequence[float], origin: int, graph: Optional[RegularDigraph] = None) -> tuple[float, float]:
    """
    Mean and standard deviation of the signed displacement from ``origin``
    on a cycle, using the representative in (-N/2, N/2].
    """
    p = np.asarray(p, dtype=np.float64)
    if graph is not None and (not is_cycle_graph(graph) or graph.n_vertices != p.size):
        raise ValueError("moments are defined for position distributions on a cycle")
    if abs(p.sum() - 1) > 1e-8:
        raise ValueError(f"distribution sums to {p.sum():.12g}, not 1")
    n = p.size
    disp = (np.arange(n) - origin) % n
    disp = np.where(disp > n // 2, disp - n, disp)
    if n % 2 == 0:
        # n/2 belongs to the positive side of (-N/2, N/2]
        disp = np.where(disp == -(n // 2), n // 2, disp)
    mean = float(p @ disp)
    var = float(p @ (disp - mean) ** 2)
    return mean, float(np.sqrt(max(var, 0.0)))
