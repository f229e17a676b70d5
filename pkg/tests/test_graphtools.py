import math
from itertools import combinations

import numpy as np
import pytest

from chromatic_lll import (
    Instance,
    SimpleGraph,
    enumerate_23trees,
    greedy_23tree,
    is_ell_bad,
    is_two_three_tree,
    line_graph,
    square_graph,
)
from chromatic_lll.graphtools import connected_induced_subgraphs

from helpers import random_graph


def path_graph(n: int) -> SimpleGraph:
    return SimpleGraph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def test_line_graph_disjoint(disjoint_pair):
    g = line_graph(disjoint_pair)
    assert g.adj == ((), ())


def test_line_graph_chain(chain):
    g = line_graph(chain)
    assert g.adj == ((1,), (0,))


def test_line_graph_star():
    star = Instance(n=7, q=2, edges=((0, 1, 2), (0, 3, 4), (0, 5, 6)))
    g = line_graph(star)
    assert all(len(a) == 2 for a in g.adj)  # K_3


def test_23tree_path_example():
    g = path_graph(4)
    trees = enumerate_23trees(g, 0, 2)
    assert sorted(tuple(sorted(t)) for t in trees) == [(0, 2), (0, 3)]


def test_23tree_singleton():
    g = path_graph(4)
    assert enumerate_23trees(g, 0, 1) == [frozenset([0])]


def test_23tree_triangle_empty():
    g = SimpleGraph.from_edges(3, [(0, 1), (1, 2), (0, 2)])
    assert enumerate_23trees(g, 0, 2) == []


def brute_force_23trees(g: SimpleGraph, root: int, size: int) -> set:
    """Independent oracle: filter all subsets by the definition."""
    return {
        frozenset(sub)
        for sub in combinations(range(g.n), size)
        if root in sub and is_two_three_tree(g, sub)
    }


def test_23tree_enumeration_matches_brute_force():
    rng = np.random.default_rng(31)
    for _ in range(20):
        g = random_graph(rng, int(rng.integers(4, 9)), 3)
        root = int(rng.integers(g.n))
        for size in (2, 3):
            got = set(enumerate_23trees(g, root, size))
            assert got == brute_force_23trees(g, root, size)


def test_23tree_count_bound():
    # Number of {2,3}-trees of size l through a node is at most (e d^3)^(l-1)/2.
    rng = np.random.default_rng(17)
    for _ in range(50):
        g = random_graph(rng, int(rng.integers(4, 10)), 4)
        d = max(g.max_degree(), 1)
        root = int(rng.integers(g.n))
        for size in range(2, 6):
            count = len(enumerate_23trees(g, root, size))
            assert count <= (math.e * d**3) ** (size - 1) / 2


def test_connected_subgraph_count_bound():
    rng = np.random.default_rng(23)
    for _ in range(50):
        g = random_graph(rng, int(rng.integers(4, 10)), 4)
        d = max(g.max_degree(), 1)
        root = int(rng.integers(g.n))
        for size in range(2, 6):
            count = sum(1 for _ in connected_induced_subgraphs(g, root, size))
            assert count <= (math.e * d) ** (size - 1) / 2


def test_connected_subgraphs_no_duplicates():
    g = SimpleGraph.from_edges(4, [(0, 1), (1, 2), (0, 2), (2, 3)])
    subs = list(connected_induced_subgraphs(g, 0, 3))
    assert len(subs) == len(set(subs))
    brute = {
        frozenset(s)
        for s in combinations(range(4), 3)
        if 0 in s and _connected(g, s)
    }
    assert set(subs) == brute


def _connected(g: SimpleGraph, nodes) -> bool:
    nodes = set(nodes)
    seen = {min(nodes)}
    frontier = [min(nodes)]
    while frontier:
        u = frontier.pop()
        for w in g.adj[u]:
            if w in nodes and w not in seen:
                seen.add(w)
                frontier.append(w)
    return seen == nodes


def test_greedy_singleton():
    g = path_graph(1)
    assert greedy_23tree(g, [0], 0, 1) == (0,)


def test_greedy_on_path():
    g = path_graph(5)
    tree = greedy_23tree(g, range(5), 0, g.max_degree())
    assert len(tree) >= 2
    assert is_two_three_tree(g, tree)


def test_greedy_disconnected_candidate_set():
    g = SimpleGraph.from_edges(6, [(0, 1), (4, 5)])
    with pytest.raises(ValueError):
        greedy_23tree(g, [0, 5], 0, 2)


def test_greedy_size_bound_random():
    rng = np.random.default_rng(41)
    for _ in range(20):
        g = random_graph(rng, int(rng.integers(5, 10)), 4)
        # Grow a candidate set connected in the square graph around a node.
        sq = square_graph(g)
        root = int(rng.integers(g.n))
        pool = {root}
        frontier = [root]
        while frontier and len(pool) < 6:
            u = frontier.pop(0)
            for w in sq.adj[u]:
                if w not in pool:
                    pool.add(w)
                    frontier.append(w)
        d = max(g.max_degree(), 1)
        tree = greedy_23tree(g, pool, root, d)
        assert len(tree) >= len(pool) / (d + 1)
        assert root in tree


def test_is_ell_bad_monochromatic(single_edge_q3):
    sigma = (0, 0, 0)
    assert is_ell_bad(single_edge_q3, sigma, 0, 1, 1, 2)


def test_is_ell_bad_rainbow(single_edge_q3):
    sigma = (0, 1, 2)
    assert not is_ell_bad(single_edge_q3, sigma, 0, 1, 1, 2)


def test_is_ell_bad_no_witness_tree(chain):
    # The line graph of the chain is a single edge: no {2,3}-tree of size 2.
    sigma = (0, 0, 0, 0)
    assert not is_ell_bad(chain, sigma, 0, 2, 0.5, 2)


def test_is_ell_bad_isolated_vertex():
    inst = Instance(n=4, q=2, edges=((0, 1, 2),))
    with pytest.raises(ValueError):
        is_ell_bad(inst, (0, 0, 0, 0), 3, 1, 1, 2)
