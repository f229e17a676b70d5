"""Exact brute-force reference for the uniform distribution over proper
colourings.

Everything here enumerates, with arbitrary-precision integer counts and
exact rational marginals, so no rounding ever enters the ground truth.
Vertices that occur in no edge are unconstrained and contribute a clean
q-fold factor per vertex, which the counting routines apply without
enumerating them.  Enumeration order is lexicographic over vertex order,
colours ascending, so sample indices are reproducible under a fixed seed.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterator, Mapping

import numpy as np

from .errors import BudgetExceededError, EmptySupportError
from .instance import Instance, pin_vertex

#: Default cap on the number of enumerated assignments (~q^n at q=2, n=20).
DEFAULT_ENUM_BUDGET = 1 << 20


@dataclass(frozen=True)
class ExactResult:
    """Exact count plus (optionally) the full marginal table."""

    count: int
    marginals: dict[tuple[int, int], Fraction] | None = None


def _check_budget(q: int, width: int, budget: int) -> None:
    if q**width > budget:
        raise BudgetExceededError(
            f"enumeration space {q}^{width} exceeds budget {budget}"
        )


def _iter_constrained(inst: Instance, budget: int) -> Iterator[dict[int, int]]:
    """Yield proper assignments of the constrained vertices as dicts."""
    verts = inst.constrained_vertices()
    _check_budget(inst.q, len(verts), budget)
    edges = [(set(e), p) for e, p in zip(inst.edges, inst.pinnings)]
    for combo in product(range(inst.q), repeat=len(verts)):
        assignment = dict(zip(verts, combo))
        ok = True
        for members, p in edges:
            witnessed = {assignment[v] for v in members} | p
            if len(witnessed) <= 1:
                ok = False
                break
        if ok:
            yield assignment


def exact_count(inst: Instance, budget: int = DEFAULT_ENUM_BUDGET) -> int:
    """|C|: the exact number of proper colourings."""
    constrained = sum(1 for _ in _iter_constrained(inst, budget))
    free = inst.n - len(inst.constrained_vertices())
    return constrained * inst.q**free


def enumerate_proper(
    inst: Instance, budget: int = DEFAULT_ENUM_BUDGET
) -> Iterator[tuple[int, ...]]:
    """Yield every proper full colouring in lexicographic order.

    Unlike exact_count this expands free vertices too, so the space is
    q^n; intended for tiny fixtures.
    """
    _check_budget(inst.q, inst.n, budget)
    edges = [(set(e), p) for e, p in zip(inst.edges, inst.pinnings)]
    for combo in product(range(inst.q), repeat=inst.n):
        ok = True
        for members, p in edges:
            witnessed = {combo[v] for v in members} | p
            if len(witnessed) <= 1:
                ok = False
                break
        if ok:
            yield combo


def exact_marginal(
    inst: Instance, v: int, c: int, budget: int = DEFAULT_ENUM_BUDGET
) -> Fraction:
    """Pr[sigma(v) = c] under the uniform distribution over proper
    colourings, as an exact rational."""
    if not 0 <= v < inst.n:
        raise ValueError(f"vertex {v} not in instance")
    if not 0 <= c < inst.q:
        raise ValueError(f"colour {c} out of range")
    verts = inst.constrained_vertices()
    if v not in verts:
        if exact_count(inst, budget) == 0:
            raise EmptySupportError("no proper colourings")
        return Fraction(1, inst.q)
    total = 0
    hits = 0
    for assignment in _iter_constrained(inst, budget):
        total += 1
        if assignment[v] == c:
            hits += 1
    if total == 0:
        raise EmptySupportError("no proper colourings")
    return Fraction(hits, total)


def exact_ratio(
    inst: Instance, v: int, c1: int, c2: int, budget: int = DEFAULT_ENUM_BUDGET
) -> Fraction:
    """|C1| / |C2| where C_i pins vertex v to colour c_i."""
    n1 = exact_count(pin_vertex(inst, v, c1), budget)
    n2 = exact_count(pin_vertex(inst, v, c2), budget)
    if n2 == 0:
        raise EmptySupportError(f"no proper colourings with vertex {v} = {c2}")
    return Fraction(n1, n2)


def exact_result(
    inst: Instance, with_marginals: bool = False, budget: int = DEFAULT_ENUM_BUDGET
) -> ExactResult:
    count = exact_count(inst, budget)
    if not with_marginals:
        return ExactResult(count=count)
    marginals = {
        (v, c): exact_marginal(inst, v, c, budget)
        for v in range(inst.n)
        for c in range(inst.q)
    }
    return ExactResult(count=count, marginals=marginals)


def exact_sample(
    inst: Instance, rng: np.random.Generator, budget: int = DEFAULT_ENUM_BUDGET
) -> tuple[int, ...]:
    """A uniform proper colouring, deterministic given the generator state.

    Draws one index into the lexicographic enumeration of the constrained
    part, then one uniform colour per free vertex in ascending order.
    """
    verts = inst.constrained_vertices()
    count = sum(1 for _ in _iter_constrained(inst, budget))
    if count == 0:
        raise EmptySupportError("no proper colourings")
    index = int(rng.integers(count))
    chosen: dict[int, int] | None = None
    for i, assignment in enumerate(_iter_constrained(inst, budget)):
        if i == index:
            chosen = assignment
            break
    assert chosen is not None
    out = [0] * inst.n
    for v in range(inst.n):
        if v in chosen:
            out[v] = chosen[v]
        else:
            out[v] = int(rng.integers(inst.q))
    return tuple(out)


class ConditionalCounter:
    """Cached completion counts for partial colourings of one instance.

    count(x) is the number of proper assignments of the constrained
    vertices left blank by the partial colouring x (free vertices are
    ignored throughout; their factors cancel in every ratio taken here).
    distribution(x, u) is the exact conditional law of the colour at u
    given x.  Both are memoized, which is what makes repeated coupling
    runs on one fixture cheap.
    """

    def __init__(self, inst: Instance, budget: int = DEFAULT_ENUM_BUDGET):
        self.inst = inst
        self.budget = budget
        self._constrained = inst.constrained_vertices()
        self._edges = [(set(e), p) for e, p in zip(inst.edges, inst.pinnings)]
        self._count_cache: dict[tuple[tuple[int, int], ...], int] = {}

    def _key(self, x: Mapping[int, int]) -> tuple[tuple[int, int], ...]:
        return tuple(sorted(x.items()))

    def count(self, x: Mapping[int, int]) -> int:
        key = self._key(x)
        cached = self._count_cache.get(key)
        if cached is not None:
            return cached
        blanks = [v for v in self._constrained if v not in x]
        _check_budget(self.inst.q, len(blanks), self.budget)
        base = {v: x[v] for v in self._constrained if v in x}
        total = 0
        for combo in product(range(self.inst.q), repeat=len(blanks)):
            assignment = base | dict(zip(blanks, combo))
            ok = True
            for members, p in self._edges:
                witnessed = {assignment[v] for v in members} | p
                if len(witnessed) <= 1:
                    ok = False
                    break
            if ok:
                total += 1
        self._count_cache[key] = total
        return total

    def distribution(self, x: Mapping[int, int], u: int) -> tuple[Fraction, ...]:
        """Conditional law of the colour at u given the partial colouring x."""
        if u in x:
            raise ValueError(f"vertex {u} already coloured")
        if u not in self._constrained:
            return tuple(Fraction(1, self.inst.q) for _ in range(self.inst.q))
        denom = self.count(x)
        if denom == 0:
            raise EmptySupportError("conditional support is empty")
        counts = []
        for c in range(self.inst.q):
            extended = dict(x)
            extended[u] = c
            counts.append(self.count(extended))
        assert sum(counts) == denom
        return tuple(Fraction(k, denom) for k in counts)
