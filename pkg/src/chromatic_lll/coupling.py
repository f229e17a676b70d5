"""The sequential maximal coupling of two conditioned colouring
distributions, in two forms.

run_coupling simulates the process driven by oracle-exact conditional
marginals: two partial colourings X and Y grow from a root vertex coloured
two different ways, one vertex per step, coupled maximally; discrepancy
vertices accumulate in V1, and an edge is dropped once both sides satisfy
it or once exactly k2 of its vertices are coloured while it crosses the
V1/V2 boundary (its blank vertices then count as failed).

build_tree materializes the deterministic q^2-ary tree of all colour-pair
choices up to a depth cap: the object the linear constraint systems are
generated over.  Statuses, next vertices and edge removals are pure
bookkeeping deducible from (x, y), so the tree needs no randomness.

The literal step rule "first vertex of the first crossing edge" can name
an already-coloured vertex (a successfully coupled vertex stays in V2, and
an edge can start crossing only later); the process must colour a fresh
vertex each step, so vertex selection here takes the first *uncoloured*
vertex in e and V2, and skips crossing edges with no such vertex.  Halted
states therefore satisfy: every original edge meeting both V1 and the
uncoloured part of V2 is satisfied by both sides, which is exactly what
the leaf-ratio factorization needs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Iterator, Mapping

import numpy as np

from .errors import BudgetExceededError, LeafInconsistentError
from .instance import Instance, edge_satisfied
from .oracle import DEFAULT_ENUM_BUDGET, ConditionalCounter

DEFAULT_NODE_BUDGET = 5_000_000


@dataclass(frozen=True)
class CouplingState:
    """One state of the coupling: the pair (x, y) plus derived bookkeeping.

    v1 is the failed set (always contains the root), vcol the coloured
    set; live holds the surviving edge indices in edge order.  States are
    immutable; extend returns a new one.
    """

    inst: Instance
    root: int
    k1: int
    k2: int
    x: dict[int, int]
    y: dict[int, int]
    v1: frozenset[int]
    vcol: frozenset[int]
    live: tuple[int, ...]

    def in_v2(self, v: int) -> bool:
        return v not in self.v1

    def depth(self) -> int:
        return len(self.vcol)


def _check_state(state: CouplingState) -> bool:
    inst = state.inst
    assert state.root in state.v1
    assert set(state.x) == set(state.y) == set(state.vcol)
    # Coloured vertices are in V1 or share an edge with V1.
    reach = set(state.v1)
    for e in inst.edges:
        if set(e) & state.v1:
            reach.update(e)
    assert state.vcol <= reach
    # x and y differ exactly on V1's coloured part.
    differ = {u for u in state.vcol if state.x[u] != state.y[u]}
    assert differ == state.vcol & state.v1
    # Removed edges were satisfied by both sides, or hit the k2 rule.
    live = set(state.live)
    for idx, e in enumerate(inst.edges):
        if idx in live:
            continue
        sat_both = edge_satisfied(inst, idx, state.x) and edge_satisfied(
            inst, idx, state.y
        )
        coloured = sum(1 for u in e if u in state.vcol)
        dumped = all(u in state.v1 for u in e if u not in state.vcol)
        assert sat_both or (coloured == state.k2 and dumped)
    return True


def initial_state(
    inst: Instance, v: int, c1: int, c2: int, k1: int, k2: int
) -> CouplingState:
    if not 0 <= v < inst.n:
        raise ValueError(f"vertex {v} not in instance")
    if c1 == c2:
        raise ValueError("the two root colours must differ")
    for c in (c1, c2):
        if not 0 <= c < inst.q:
            raise ValueError(f"colour {c} out of range")
    if not 0 < k2 < k1:
        raise ValueError("need 0 < k2 < k1")
    if inst.edges and k1 > inst.k_min:
        raise ValueError(f"k1={k1} exceeds smallest edge size {inst.k_min}")
    state = CouplingState(
        inst=inst,
        root=v,
        k1=k1,
        k2=k2,
        x={v: c1},
        y={v: c2},
        v1=frozenset([v]),
        vcol=frozenset([v]),
        live=tuple(range(len(inst.edges))),
    )
    assert _check_state(state)
    return state


def _selectable(state: CouplingState, e_idx: int) -> int | None:
    """First uncoloured V2 vertex of a crossing live edge, else None."""
    edge = state.inst.edges[e_idx]
    if not any(u in state.v1 for u in edge):
        return None
    v2_part = [u for u in edge if u not in state.v1]
    if not v2_part:
        return None
    fresh = [u for u in v2_part if u not in state.vcol]
    if not fresh:
        return None
    return min(fresh)


def next_vertex(state: CouplingState) -> int | None:
    """The vertex the process colours next, or None when halted."""
    for e_idx in state.live:
        u = _selectable(state, e_idx)
        if u is not None:
            return u
    return None


def extend(
    state: CouplingState, u: int, cx: int, cy: int, k2: int | None = None
) -> CouplingState:
    """Colour u with cx on the x side and cy on the y side, then apply the
    removal rules to the edges through u."""
    if k2 is None:
        k2 = state.k2
    elif k2 != state.k2:
        raise ValueError("k2 differs from the state's k2")
    if u != next_vertex(state):
        raise ValueError(f"vertex {u} is not the designated next vertex")
    inst = state.inst
    x = dict(state.x)
    y = dict(state.y)
    x[u] = cx
    y[u] = cy
    vcol = state.vcol | {u}
    v1 = state.v1 | {u} if cx != cy else state.v1
    live = list(state.live)
    # First pass: edges through u now satisfied by both sides.
    for e_idx in list(live):
        if u in inst.edges[e_idx]:
            if edge_satisfied(inst, e_idx, x) and edge_satisfied(inst, e_idx, y):
                live.remove(e_idx)
    # Second pass: crossing edges through u with exactly k2 coloured
    # vertices; their blanks join V1 and the edge is dropped.  Sequential:
    # each removal can change crossing status for later edges.
    for e_idx in list(live):
        edge = inst.edges[e_idx]
        if u not in edge:
            continue
        if not any(w in v1 for w in edge):
            continue
        if all(w in v1 for w in edge):
            continue
        if sum(1 for w in edge if w in vcol) == k2:
            v1 = v1 | {w for w in edge if w not in vcol}
            live.remove(e_idx)
    out = CouplingState(
        inst=inst,
        root=state.root,
        k1=state.k1,
        k2=state.k2,
        x=x,
        y=y,
        v1=v1,
        vcol=vcol,
        live=tuple(live),
    )
    assert _check_state(out)
    return out


def coupling_atoms(
    counter: ConditionalCounter, state: CouplingState, u: int
) -> list[tuple[int, int, Fraction]]:
    """The maximal coupling of the two conditional laws at u, as a list of
    (cx, cy, probability) atoms with exact rational masses.

    Overlap mass couples identically; the residual mass on each side is
    paired by walking both sides in increasing colour order.
    """
    px = counter.distribution(state.x, u)
    py = counter.distribution(state.y, u)
    atoms: list[tuple[int, int, Fraction]] = []
    rx: list[Fraction] = []
    ry: list[Fraction] = []
    for c in range(state.inst.q):
        m = min(px[c], py[c])
        if m > 0:
            atoms.append((c, c, m))
        rx.append(px[c] - m)
        ry.append(py[c] - m)
    i = j = 0
    q = state.inst.q
    while True:
        while i < q and rx[i] == 0:
            i += 1
        while j < q and ry[j] == 0:
            j += 1
        if i >= q or j >= q:
            break
        m = min(rx[i], ry[j])
        atoms.append((i, j, m))
        rx[i] -= m
        ry[j] -= m
    assert sum(a[2] for a in atoms) == 1
    return atoms


def run_coupling(
    inst: Instance,
    v: int,
    c1: int,
    c2: int,
    k1: int,
    k2: int,
    rng: np.random.Generator,
    counter: ConditionalCounter | None = None,
) -> CouplingState:
    """Simulate the coupling to termination; deterministic given the
    generator state.  The counter may be shared across runs to reuse its
    caches."""
    if counter is None:
        counter = ConditionalCounter(inst)
    state = initial_state(inst, v, c1, c2, k1, k2)
    while True:
        u = next_vertex(state)
        if u is None:
            return state
        atoms = coupling_atoms(counter, state, u)
        r = rng.random()
        acc = 0.0
        chosen = atoms[-1]
        for atom in atoms:
            acc += float(atom[2])
            if r < acc:
                chosen = atom
                break
        state = extend(state, u, chosen[0], chosen[1])


def blocked_edges(state: CouplingState) -> frozenset[int]:
    """Edges blocked by (x, y), against the original edge list: some
    coloured vertex of the edge differs between x and y, or the edge has
    exactly k2 coloured vertices and is unsatisfied on at least one side.
    """
    inst = state.inst
    out = set()
    for e_idx, edge in enumerate(inst.edges):
        coloured = [u for u in edge if u in state.vcol]
        if not coloured:
            continue
        if any(state.x[u] != state.y[u] for u in coloured):
            out.add(e_idx)
            continue
        if len(coloured) == state.k2 and not (
            edge_satisfied(inst, e_idx, state.x)
            and edge_satisfied(inst, e_idx, state.y)
        ):
            out.add(e_idx)
    return frozenset(out)


def leaf_counts(
    inst: Instance,
    state: CouplingState,
    budget: int = DEFAULT_ENUM_BUDGET,
) -> tuple[int, int]:
    """(N_x, N_y): completions of the blank V1 vertices consistent with x
    (resp. y), checked against every original edge inside V1 union Vcol.

    On a halted state these determine |C_x| / |C_y| exactly: edges meeting
    both V1 and the uncoloured part of V2 are satisfied by both sides, and
    x, y agree on the coloured part of V2, so all other factors cancel.
    """
    region = state.v1 | state.vcol
    relevant = [
        e_idx for e_idx, e in enumerate(inst.edges) if set(e) <= region
    ]
    blanks = sorted({u for e in relevant for u in inst.edges[e] if u not in state.vcol})
    if inst.q ** len(blanks) > budget:
        raise BudgetExceededError(
            f"leaf enumeration {inst.q}^{len(blanks)} exceeds budget {budget}"
        )
    nx = ny = 0
    for combo in product(range(inst.q), repeat=len(blanks)):
        fill = dict(zip(blanks, combo))
        ok_x = ok_y = True
        for e_idx in relevant:
            edge = inst.edges[e_idx]
            pin = inst.pinnings[e_idx]
            seen_x = set(pin)
            seen_y = set(pin)
            for w in edge:
                cw = fill.get(w)
                if cw is None:
                    seen_x.add(state.x[w])
                    seen_y.add(state.y[w])
                else:
                    seen_x.add(cw)
                    seen_y.add(cw)
            if len(seen_x) <= 1:
                ok_x = False
            if len(seen_y) <= 1:
                ok_y = False
            if not ok_x and not ok_y:
                break
        nx += ok_x
        ny += ok_y
    return nx, ny


def leaf_ratio(
    inst: Instance, state: CouplingState, budget: int = DEFAULT_ENUM_BUDGET
) -> Fraction:
    """|C_x| / |C_y| at a halted state, exactly."""
    if next_vertex(state) is not None:
        raise ValueError("leaf ratio is defined on halted states only")
    nx, ny = leaf_counts(inst, state, budget)
    if ny == 0:
        raise LeafInconsistentError("y side admits no proper completion")
    return Fraction(nx, ny)


@dataclass
class CouplingNode:
    """One node of the truncated coupling tree.

    status is "internal", "halted" or "truncated"; depth equals the number
    of coloured vertices.  Internal nodes record the next vertex u and a
    child per colour pair; halted leaves record the completion counts
    (nx, ny) behind their ratio.  States are not stored (children encode
    deltas); CouplingTree.iter_nodes replays them on demand.
    """

    index: int
    depth: int
    status: str
    u: int | None = None
    children: dict[tuple[int, int], "CouplingNode"] | None = None
    nx: int | None = None
    ny: int | None = None

    def ratio(self) -> Fraction:
        if self.status != "halted":
            raise ValueError("ratio defined on halted leaves only")
        assert self.nx is not None and self.ny is not None
        if self.ny == 0:
            raise LeafInconsistentError("y side admits no proper completion")
        return Fraction(self.nx, self.ny)


@dataclass
class CouplingTree:
    inst: Instance
    v: int
    c1: int
    c2: int
    k1: int
    k2: int
    depth_cap: int
    root: CouplingNode
    root_state: CouplingState = field(repr=False)
    n_nodes: int = 0
    n_internal: int = 0
    n_halted: int = 0
    n_truncated: int = 0
    n_halted_below: int = 0  # halted leaves with depth < depth_cap

    def iter_nodes(self) -> Iterator[tuple[CouplingNode, CouplingState]]:
        """Depth-first traversal yielding (node, state) pairs."""
        stack: list[tuple[CouplingNode, CouplingState]] = [(self.root, self.root_state)]
        while stack:
            node, state = stack.pop()
            yield node, state
            if node.children:
                for key in sorted(node.children, reverse=True):
                    child = node.children[key]
                    stack.append((child, extend(state, node.u, key[0], key[1])))

    def gamma(self) -> float:
        """Multiplicative truncation error 4*exp(-L/(k^3 delta^2))."""
        if not self.inst.edges:
            return 0.0
        k = self.inst.k_max
        d = self.inst.delta
        return 4.0 * float(np.exp(-self.depth_cap / (k**3 * d**2)))


def build_tree(
    inst: Instance,
    v: int,
    c1: int,
    c2: int,
    k1: int,
    k2: int,
    depth_cap: int,
    node_budget: int = DEFAULT_NODE_BUDGET,
    leaf_budget: int = DEFAULT_ENUM_BUDGET,
) -> CouplingTree:
    """Materialize the full q^2-ary coupling tree truncated at depth_cap.

    Every node's status follows from replaying the deterministic
    bookkeeping; all q^2 children are created for internal nodes, including
    zero-probability extensions, because the conservation constraints sum
    over every colour pair.
    """
    if depth_cap < 1:
        raise ValueError("depth cap must be at least 1")
    root_state = initial_state(inst, v, c1, c2, k1, k2)
    tree = CouplingTree(
        inst=inst,
        v=v,
        c1=c1,
        c2=c2,
        k1=k1,
        k2=k2,
        depth_cap=depth_cap,
        root=None,  # type: ignore[arg-type]
        root_state=root_state,
    )
    counter = [0]

    def make(state: CouplingState) -> CouplingNode:
        counter[0] += 1
        if counter[0] > node_budget:
            raise BudgetExceededError(f"coupling tree exceeds {node_budget} nodes")
        index = counter[0] - 1
        depth = state.depth()
        u = next_vertex(state)
        if u is None:
            nx, ny = leaf_counts(inst, state, leaf_budget)
            node = CouplingNode(index=index, depth=depth, status="halted", nx=nx, ny=ny)
            tree.n_halted += 1
            if depth < depth_cap:
                tree.n_halted_below += 1
            return node
        if depth >= depth_cap:
            tree.n_truncated += 1
            return CouplingNode(index=index, depth=depth, status="truncated")
        children = {}
        for cx in range(inst.q):
            for cy in range(inst.q):
                children[(cx, cy)] = make(extend(state, u, cx, cy))
        tree.n_internal += 1
        return CouplingNode(
            index=index, depth=depth, status="internal", u=u, children=children
        )

    tree.root = make(root_state)
    tree.n_nodes = counter[0]
    return tree
