import numpy as np
import pytest

from conftest import brute_line_digraph_arcs, brute_paths
from qwmem.graph import (
    GraphError,
    RegularDigraph,
    ResourceLimitError,
    arc_paths,
    cycle_graph,
    directed_cycle,
    is_cycle_graph,
    iterated_line_digraph,
    line_digraph,
)


def test_cycle_graph_small():
    g = cycle_graph(3)
    assert (g.n_vertices, g.n_arcs, g.degree) == (3, 6, 2)
    assert set(cycle_graph(4).out_neighbors(0).tolist()) == {1, 3}


def test_cycle_graph_arc_order():
    g = cycle_graph(5)
    assert g.arcs()[:4] == [(0, 1), (0, 4), (1, 2), (1, 0)]


def test_cycle_graph_rejects_small():
    with pytest.raises(GraphError):
        cycle_graph(2)


def test_line_digraph_of_dicycle_is_dicycle():
    lg = line_digraph(directed_cycle(3))
    assert lg.degree == 1
    assert lg.heads.ravel().tolist() == [1, 2, 0]


def test_line_digraph_c3_counts():
    lg = line_digraph(cycle_graph(3))
    assert lg.n_vertices == 6
    assert lg.n_arcs == 12
    assert np.all(np.bincount(lg.heads.ravel(), minlength=6) == 2)


@pytest.mark.parametrize("n", range(3, 9))
def test_line_digraph_matches_brute_force(n):
    g = cycle_graph(n)
    lg = line_digraph(g)
    want = brute_line_digraph_arcs(g.arcs())
    assert sorted(lg.arcs()) == sorted(want)


@pytest.mark.parametrize("n", range(4, 9))
def test_line_digraph_cycle_neighbours(n):
    g = cycle_graph(n)
    lg = line_digraph(g)
    arcs = g.arcs()
    for x in range(n):
        v = arcs.index((x, (x + 1) % n))
        outs = {arcs[w] for w in lg.out_neighbors(v)}
        assert outs == {((x + 1) % n, (x + 2) % n), ((x + 1) % n, x)}


def test_line_digraph_out_order_follows_head():
    g = cycle_graph(6)
    lg = line_digraph(g)
    arcs = g.arcs()
    # out-arcs of vertex (a, b) follow the out-arc order of b in g
    for v, (a, b) in enumerate(arcs):
        assert [arcs[w] for w in lg.out_neighbors(v)] == [(b, int(h)) for h in g.out_neighbors(b)]


def test_iterated_sizes():
    g = cycle_graph(8)
    l1, p1 = iterated_line_digraph(g, 1)
    l2, p2 = iterated_line_digraph(g, 2)
    assert l1.n_vertices == 16 and l2.n_vertices == 32
    assert l2.n_arcs == 8 * 2**3
    assert p2.shape == (32, 3)
    assert (3, 4, 5) in {tuple(p) for p in p2.tolist()}
    assert (3, 4, 3) in {tuple(p) for p in p2.tolist()}


def test_iterated_depth_one_decodes_arcs():
    g = cycle_graph(7)
    _, paths = iterated_line_digraph(g, 1)
    assert [tuple(p) for p in paths.tolist()] == g.arcs()


@pytest.mark.parametrize("n,d", [(4, 1), (4, 2), (5, 3), (6, 2)])
def test_path_decoding_is_every_walk_once(n, d):
    g = cycle_graph(n)
    lg, paths = iterated_line_digraph(g, d)
    assert sorted(tuple(p) for p in paths.tolist()) == sorted(brute_paths(g.heads, d))
    for (u, w) in lg.arcs():
        assert tuple(paths[u][1:]) == tuple(paths[w][:-1])


def test_arc_paths():
    g = cycle_graph(5)
    lg, paths = iterated_line_digraph(g, 1)
    ap = arc_paths(lg, paths)
    assert ap.shape == (20, 3)
    assert all(tuple(ap[a][:2]) == tuple(paths[t]) for a, t in enumerate(lg.tails))


def test_iterated_cap():
    with pytest.raises(ResourceLimitError):
        iterated_line_digraph(cycle_graph(8), 10, cap=1000)
    with pytest.raises(ValueError):
        iterated_line_digraph(cycle_graph(8), 0)


def test_random_regular_iterated_counts(rng):
    from qwmem.generate import random_regular_digraph

    for _ in range(5):
        g = random_regular_digraph(6, 3, rng)
        for d in (1, 2):
            lg, _ = iterated_line_digraph(g, d)
            assert lg.n_vertices == 6 * 3**d
            assert lg.n_arcs == 6 * 3 ** (d + 1)


@pytest.mark.parametrize(
    "heads,msg",
    [
        ([[0, 1], [0, 2], [1, 0]], "self-loop"),
        ([[1, 1], [0, 2], [0, 1]], "parallel"),
        ([[1, 2], [2, 0], [1, 0]], None),
        ([[1, 2], [2, 3], [3, 1], [1, 2]], "in-degree"),
    ],
)
def test_ingestion_rules(heads, msg):
    if msg is None:
        RegularDigraph(heads)
        return
    with pytest.raises(GraphError, match=msg):
        RegularDigraph(heads)


def test_in_arcs_and_adjacency():
    g = cycle_graph(5)
    for v in range(5):
        assert all(g.heads.ravel()[a] == v for a in g.in_arcs[v])
    assert g.adjacency().sum() == 10
    assert g.arc_index(2, 1) == 5
    with pytest.raises(KeyError):
        g.arc_index(0, 2)


def test_is_cycle_graph():
    assert is_cycle_graph(cycle_graph(9))
    assert not is_cycle_graph(line_digraph(cycle_graph(4)))


def test_graph_is_immutable():
    g = cycle_graph(4)
    with pytest.raises(ValueError):
        g.heads[0, 0] = 2
