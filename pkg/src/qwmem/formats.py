"""
Plain-text file formats.

All formats are whitespace separated; blank lines and anything after ``#``
are ignored.  Vertex ids and coin indices are 0-based.

graph        ``n m`` then n lines, line v listing the m out-neighbours of v.
             The listed order defines arc indices (arc v*m + k).
partition    ``n m`` then n lines of 2m integers: the m successors of v
             (coin 0..m-1) followed by the m coin-shift outputs gc(v, k).
             An optional ``|`` may separate the two halves.
successor    ``n_arcs`` then n_arcs lines, line a holding next[a].
amplitudes   ``n m`` then n lines of 2m floats: re im pairs in out-arc order.
"""

from __future__ import annotations

from pathlib import Path
from typing import Iterator, Union

import numpy as np

from .graph import GraphError, RegularDigraph
from .partition import ArcSuccessor, CoinShiftFunction, VertexPartition
from .szegedy import TransitionAmplitudes

__all__ = [
    "FormatError",
    "read_graph",
    "write_graph",
    "read_partition",
    "write_partition",
    "read_successor",
    "write_successor",
    "read_amplitudes",
    "write_amplitudes",
]

PathLike = Union[str, Path]


class FormatError(ValueError):
    def __init__(self, path, line: int, message: str):
        super().__init__(f"{path}:{line}: {message}")
        self.path = str(path)
        self.line = line


def _records(path: PathLike) -> Iterator[tuple[int, list[str]]]:
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            tokens = raw.split("#", 1)[0].replace("|", " ").split()
            if tokens:
                yield lineno, tokens


def _ints(path, lineno: int, tokens: list[str], count: int) -> list[int]:
    if len(tokens) != count:
        raise FormatError(path, lineno, f"expected {count} integers, found {len(tokens)}")
    try:
        return [int(t) for t in tokens]
    except ValueError as exc:
        raise FormatError(path, lineno, str(exc)) from None


def _read_table(path: PathLike, per_row, parse) -> tuple[int, int, list]:
    """Header 'n m' then n rows; returns (n, m, rows)."""
    records = list(_records(path))
    if not records:
        raise FormatError(path, 1, "empty file")
    lineno, header = records[0]
    n, m = _ints(path, lineno, header, 2)
    if n < 1 or m < 1:
        raise FormatError(path, lineno, f"bad header n={n} m={m}")
    body = records[1:]
    if len(body) < n:
        last = body[-1][0] if body else lineno
        raise FormatError(path, last + 1, f"expected {n} rows, file ends after {len(body)}")
    if len(body) > n:
        raise FormatError(path, body[n][0], f"unexpected extra row (only {n} declared)")
    rows = [parse(path, ln, toks, per_row(m)) for ln, toks in body]
    return n, m, rows


def read_graph(path: PathLike) -> RegularDigraph:
    n, m, rows = _read_table(path, lambda m: m, _ints)
    try:
        return RegularDigraph(np.array(rows, dtype=np.int64))
    except GraphError as exc:
        raise FormatError(path, 0, f"invalid graph: {exc}") from None


def write_graph(path: PathLike, g: RegularDigraph) -> None:
    lines = [f"{g.n_vertices} {g.degree}"]
    lines += [" ".join(map(str, row)) for row in g.heads.tolist()]
    Path(path).write_text("\n".join(lines) + "\n")


def read_partition(path: PathLike, graph: RegularDigraph) -> tuple[VertexPartition, CoinShiftFunction]:
    n, m, rows = _read_table(path, lambda m: 2 * m, _ints)
    if (n, m) != (graph.n_vertices, graph.degree):
        raise FormatError(path, 1, f"header {n} {m} does not match graph ({graph.n_vertices}, {graph.degree})")
    arr = np.array(rows, dtype=np.int64)
    succ = arr[:, :m]
    if succ.min() < 0 or succ.max() >= n:
        v = int(np.argwhere((succ < 0) | (succ >= n))[0][0])
        raise FormatError(path, 0, f"successor of vertex {v} is out of range")
    return VertexPartition(graph, succ.T.copy()), CoinShiftFunction(arr[:, m:])


def write_partition(path: PathLike, p: VertexPartition, gc: CoinShiftFunction) -> None:
    n, m = p.graph.n_vertices, p.m
    lines = [f"{n} {m}"]
    for v in range(n):
        succ = " ".join(str(int(p.successors[k, v])) for k in range(m))
        shift = " ".join(str(int(gc.table[v, k])) for k in range(m))
        lines.append(f"{succ} | {shift}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_successor(path: PathLike, graph: RegularDigraph) -> ArcSuccessor:
    records = list(_records(path))
    if not records:
        raise FormatError(path, 1, "empty file")
    lineno, header = records[0]
    (n_arcs,) = _ints(path, lineno, header, 1)
    if n_arcs != graph.n_arcs:
        raise FormatError(path, lineno, f"declares {n_arcs} arcs, graph has {graph.n_arcs}")
    body = records[1:]
    if len(body) != n_arcs:
        where = body[-1][0] + 1 if body else lineno + 1
        raise FormatError(path, where, f"expected {n_arcs} rows, found {len(body)}")
    nxt = [_ints(path, ln, toks, 1)[0] for ln, toks in body]
    return ArcSuccessor(graph, np.array(nxt, dtype=np.int64))


def write_successor(path: PathLike, f: ArcSuccessor) -> None:
    lines = [str(f.graph.n_arcs)] + [str(int(x)) for x in f.next]
    Path(path).write_text("\n".join(lines) + "\n")


def _floats(path, lineno: int, tokens: list[str], count: int) -> list[float]:
    if len(tokens) != count:
        raise FormatError(path, lineno, f"expected {count} numbers, found {len(tokens)}")
    try:
        return [float(t) for t in tokens]
    except ValueError as exc:
        raise FormatError(path, lineno, str(exc)) from None


def read_amplitudes(path: PathLike, graph: RegularDigraph) -> TransitionAmplitudes:
    n, m, rows = _read_table(path, lambda m: 2 * m, _floats)
    if (n, m) != (graph.n_vertices, graph.degree):
        raise FormatError(path, 1, f"header {n} {m} does not match graph ({graph.n_vertices}, {graph.degree})")
    arr = np.array(rows)
    return TransitionAmplitudes(arr[:, 0::2] + 1j * arr[:, 1::2])


def write_amplitudes(path: PathLike, amps: TransitionAmplitudes) -> None:
    a = amps.alpha
    lines = [f"{a.shape[0]} {a.shape[1]}"]
    for row in a:
        lines.append(" ".join(f"{z.real!r} {z.imag!r}" for z in row.tolist()))
    Path(path).write_text("\n".join(lines) + "\n")
