"""Line graphs, {2,3}-trees, and the bad-colouring classifier.

A {2,3}-tree in a graph is a set of nodes that are pairwise at distance at
least 2 and that becomes connected once every pair at distance 2 or 3 is
joined by an edge.  These sets witness the union bounds behind the
truncation analysis; everything here is analysis-side tooling sized for
small hosts, with explicit enumeration budgets.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator

from .errors import BudgetExceededError
from .instance import Instance


@dataclass(frozen=True)
class SimpleGraph:
    """Undirected graph with sorted neighbour lists and no self-loops."""

    n: int
    adj: tuple[tuple[int, ...], ...]

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "SimpleGraph":
        neigh: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            if u == v:
                raise ValueError("self-loops not allowed")
            neigh[u].add(v)
            neigh[v].add(u)
        return cls(n=n, adj=tuple(tuple(sorted(s)) for s in neigh))

    def max_degree(self) -> int:
        return max((len(a) for a in self.adj), default=0)


def line_graph(inst: Instance) -> SimpleGraph:
    """Node i is edge i of the instance; adjacent iff the edges share a
    vertex."""
    members = [set(e) for e in inst.edges]
    m = len(members)
    edges = [
        (i, j) for i in range(m) for j in range(i + 1, m) if members[i] & members[j]
    ]
    return SimpleGraph.from_edges(m, edges)


class DistanceOracle:
    """BFS distances with one cached row per queried source."""

    def __init__(self, g: SimpleGraph):
        self.g = g
        self._rows: dict[int, list[int]] = {}

    def row(self, src: int) -> list[int]:
        cached = self._rows.get(src)
        if cached is not None:
            return cached
        dist = [-1] * self.g.n
        dist[src] = 0
        queue = deque([src])
        while queue:
            u = queue.popleft()
            for w in self.g.adj[u]:
                if dist[w] < 0:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        self._rows[src] = dist
        return dist

    def dist(self, u: int, v: int) -> int:
        return self.row(u)[v]


def power_graph(g: SimpleGraph, radius: int) -> SimpleGraph:
    """Adjacency between distinct nodes at distance <= radius in g."""
    oracle = DistanceOracle(g)
    edges = []
    for u in range(g.n):
        row = oracle.row(u)
        for v in range(u + 1, g.n):
            if 0 < row[v] <= radius:
                edges.append((u, v))
    return SimpleGraph.from_edges(g.n, edges)


def square_graph(g: SimpleGraph) -> SimpleGraph:
    return power_graph(g, 2)


def is_two_three_tree(g: SimpleGraph, nodes: Iterable[int]) -> bool:
    """Definition check: pairwise distance >= 2, and connected after
    joining pairs at distance 2 or 3."""
    members = sorted(set(nodes))
    if not members:
        return False
    oracle = DistanceOracle(g)
    for i, u in enumerate(members):
        row = oracle.row(u)
        for v in members[i + 1 :]:
            if row[v] == 1 or u == v:
                return False
    # Connectivity through distance-2/3 joins.
    index = {u: i for i, u in enumerate(members)}
    seen = {members[0]}
    queue = deque([members[0]])
    while queue:
        u = queue.popleft()
        row = oracle.row(u)
        for v in members:
            if v not in seen and row[v] in (2, 3):
                seen.add(v)
                queue.append(v)
    return len(seen) == len(members)


def connected_induced_subgraphs(
    g: SimpleGraph, root: int, size: int, budget: int | None = None
) -> Iterator[frozenset[int]]:
    """All node sets of the given size containing root whose induced
    subgraph is connected, each exactly once."""
    if size < 1:
        raise ValueError("size must be positive")
    emitted = 0

    def rec(sub: frozenset[int], ext: set[int], banned: frozenset[int]):
        nonlocal emitted
        if len(sub) == size:
            emitted += 1
            if budget is not None and emitted > budget:
                raise BudgetExceededError(f"more than {budget} subgraphs")
            yield sub
            return
        local_banned = set(banned)
        for w in sorted(ext):
            if w in local_banned:
                continue
            new_sub = sub | {w}
            new_ext = (ext | set(g.adj[w])) - new_sub - local_banned - {w}
            yield from rec(new_sub, new_ext, frozenset(local_banned))
            local_banned.add(w)

    initial_ext = set(g.adj[root])
    yield from rec(frozenset([root]), initial_ext, frozenset())


def enumerate_23trees(
    g: SimpleGraph, root: int, size: int, budget: int | None = None
) -> list[frozenset[int]]:
    """All {2,3}-trees of the given size containing root, no duplicates.

    Candidates are connected sets in the auxiliary graph joining pairs at
    distance 2 or 3; the pairwise-distance condition is then filtered.
    """
    if size < 1:
        raise ValueError("size must be positive")
    if size == 1:
        return [frozenset([root])]
    oracle = DistanceOracle(g)
    aux_edges = []
    for u in range(g.n):
        row = oracle.row(u)
        for v in range(u + 1, g.n):
            if row[v] in (2, 3):
                aux_edges.append((u, v))
    aux = SimpleGraph.from_edges(g.n, aux_edges)
    out = []
    for candidate in connected_induced_subgraphs(aux, root, size, budget):
        members = sorted(candidate)
        ok = True
        for i, u in enumerate(members):
            row = oracle.row(u)
            for v in members[i + 1 :]:
                if row[v] == 1:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            out.append(candidate)
    return out


def greedy_23tree(
    g: SimpleGraph, candidate_set: Iterable[int], anchor: int, deg_bound: int
) -> tuple[int, ...]:
    """Greedy extraction of a {2,3}-tree from a candidate set that is
    connected in the square of g.

    Starting from the anchor, repeatedly discards everything within
    distance 1 of the tree and adopts the first remaining candidate at
    distance <= 3.  Each step consumes at most deg_bound + 1 candidates,
    so the result has size at least |B| / (deg_bound + 1).
    """
    pool = set(candidate_set)
    if anchor not in pool:
        raise ValueError("anchor must belong to the candidate set")
    # Precondition: candidate set connected in the distance-<=2 power.
    oracle = DistanceOracle(g)
    seen = {anchor}
    queue = deque([anchor])
    while queue:
        u = queue.popleft()
        row = oracle.row(u)
        for v in pool:
            if v not in seen and 0 < row[v] <= 2:
                seen.add(v)
                queue.append(v)
    if seen != pool:
        raise ValueError("candidate set is not connected in the square graph")

    size_b = len(pool)
    tree = [anchor]
    pool -= {v for v in pool if oracle.dist(anchor, v) <= 1}
    while True:
        best = None
        for v in sorted(pool):
            if min(oracle.dist(t, v) for t in tree) <= 3:
                best = v
                break
        if best is None:
            break
        tree.append(best)
        pool -= {v for v in pool if oracle.dist(best, v) <= 1}
    result = tuple(tree)
    assert is_two_three_tree(g, result)
    assert Fraction(len(result)) >= Fraction(size_b, deg_bound + 1)
    return result


def is_ell_bad(
    inst: Instance,
    sigma,
    v: int,
    ell: int,
    beta,
    k2: int,
    budget: int | None = None,
) -> bool:
    """Exact bad-colouring decision for a full colouring sigma.

    sigma is ell-bad at v when some {2,3}-tree T of size ell through the
    first edge at v admits a choice of exactly k2 coloured vertices per
    tree edge making at least beta*ell of them monochromatic on those
    vertices.  Tree edges are disjoint, so the per-edge choices are
    independent: an edge can be made monochromatic iff some colour attains
    multiplicity >= k2 on it.
    """
    incident = inst.incident_edges(v)
    if not incident:
        raise ValueError(f"vertex {v} is isolated; no anchor edge")
    if k2 < 1:
        raise ValueError("k2 must be positive")
    e0 = incident[0]
    beta = Fraction(beta)
    lin = line_graph(inst)
    for tree in enumerate_23trees(lin, e0, ell, budget):
        # Every tree edge must be able to host exactly k2 coloured vertices.
        if any(len(inst.edges[e]) < k2 for e in tree):
            continue
        capable = 0
        for e in tree:
            multiplicity: dict[int, int] = {}
            for u in inst.edges[e]:
                multiplicity[sigma[u]] = multiplicity.get(sigma[u], 0) + 1
            if max(multiplicity.values()) >= k2:
                capable += 1
        if Fraction(capable) >= beta * ell:
            return True
    return False
