"""Linear feasibility certification of coupling trees.

Over a truncated coupling tree, two variables per node mimic the
probabilities that the coupling passes through that node conditioned on
the final colouring extending its x (resp. y) side.  Three constraint
families are generated:

* ratio rows, for halted leaves strictly above the truncation depth:
  r_lo * N_y * py <= N_x * px <= r_hi * N_y * py, the cleared form of
  r_lo * py <= px * r <= r_hi * py with the leaf ratio r = N_x / N_y kept
  as an exact pair of counts (so leaves whose y side is inconsistent
  simply force N_x * px = 0 instead of dividing by zero);
* conservation rows: both root variables equal 1, and at every internal
  node each side's variable equals, for every colour, the sum of the
  matching children;
* decay rows: every off-diagonal child is at most 5/t_star times its
  parent, on both sides.

Feasibility of the system for guesses (r_lo, r_hi) certifies that the
true ratio of the two root-pinned counts lies in [exp(-gamma) r_lo,
exp(gamma) r_hi] with gamma the tree's truncation error; a geometric
binary search narrows the bracket.  The feasibility decision itself is
delegated to scipy's HiGHS backend with a zero objective.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable

import numpy as np
from scipy.optimize import linprog

from .coupling import (
    DEFAULT_NODE_BUDGET,
    CouplingNode,
    CouplingTree,
    build_tree,
    coupling_atoms,
    extend,
)
from .errors import (
    InfeasibleBracketError,
    SolverFailureError,
    VacuousSystemError,
)
from .instance import Instance
from .lll import GUARD, marginal_bounds
from .oracle import DEFAULT_ENUM_BUDGET, ConditionalCounter
from .params import AlgoParams

DEFAULT_FEASIBILITY_TOL = 1e-9
#: Fallback bracket half-width when the admission check fails.
DEFAULT_BRACKET_DELTA = 1e-6


@dataclass(frozen=True)
class Row:
    """One constraint: sum(coef * var) (<=|==) rhs."""

    coeffs: tuple[tuple[int, float | int], ...]
    rhs: float
    kind: str  # "le" or "eq"
    family: str  # "root" | "conservation" | "ratio" | "decay"


@dataclass
class LPSystem:
    n_vars: int
    rows: list[Row] = field(default_factory=list)
    r_lo: float = 0.0
    r_hi: float = 0.0
    t_star: float = 0.0
    depth_cap: int = 0

    def family_count(self, family: str) -> int:
        return sum(1 for r in self.rows if r.family == family)

    @property
    def is_vacuous(self) -> bool:
        """No ratio rows: feasibility carries no bracket information."""
        return self.family_count("ratio") == 0

    def check_values(self, values: dict[int, Fraction]) -> list[Row]:
        """Rows violated by an exact assignment (floats converted exactly)."""
        bad = []
        for row in self.rows:
            total = Fraction(0)
            for var, coef in row.coeffs:
                total += Fraction(coef) * values[var]
            rhs = Fraction(row.rhs)
            if row.kind == "eq":
                if total != rhs:
                    bad.append(row)
            elif total > rhs:
                bad.append(row)
        return bad


def var_x(node: CouplingNode) -> int:
    return 2 * node.index


def var_y(node: CouplingNode) -> int:
    return 2 * node.index + 1


def generate_lp(
    tree: CouplingTree, r_lo: float, r_hi: float, t_star: float
) -> LPSystem:
    """Emit the three constraint families over a built tree.

    Trees with no halted leaf below the depth cap yield a vacuous system
    (flagged on the result); the bracket search refuses to run on those.
    """
    if r_lo <= 0 or r_hi <= 0 or t_star <= 0:
        raise ValueError("r_lo, r_hi and t_star must be positive")
    sys = LPSystem(
        n_vars=2 * tree.n_nodes,
        r_lo=r_lo,
        r_hi=r_hi,
        t_star=t_star,
        depth_cap=tree.depth_cap,
    )
    q = tree.inst.q
    decay = 5.0 / t_star

    root = tree.root
    sys.rows.append(Row(((var_x(root), 1),), 1.0, "eq", "root"))
    sys.rows.append(Row(((var_y(root), 1),), 1.0, "eq", "root"))

    stack = [root]
    while stack:
        node = stack.pop()
        if node.status == "halted" and node.depth < tree.depth_cap:
            nx, ny = node.nx, node.ny
            assert nx is not None and ny is not None
            sys.rows.append(
                Row(
                    ((var_y(node), r_lo * ny), (var_x(node), -nx)),
                    0.0,
                    "le",
                    "ratio",
                )
            )
            sys.rows.append(
                Row(
                    ((var_x(node), nx), (var_y(node), -r_hi * ny)),
                    0.0,
                    "le",
                    "ratio",
                )
            )
        if node.status != "internal":
            continue
        children = node.children
        assert children is not None
        for c in range(q):
            row_x = [(var_x(node), 1)] + [
                (var_x(children[(c, cc)]), -1) for cc in range(q)
            ]
            sys.rows.append(Row(tuple(row_x), 0.0, "eq", "conservation"))
            row_y = [(var_y(node), 1)] + [
                (var_y(children[(cc, c)]), -1) for cc in range(q)
            ]
            sys.rows.append(Row(tuple(row_y), 0.0, "eq", "conservation"))
        for (cx, cy), child in children.items():
            if cx == cy:
                continue
            sys.rows.append(
                Row(
                    ((var_x(child), 1), (var_x(node), -decay)),
                    0.0,
                    "le",
                    "decay",
                )
            )
            sys.rows.append(
                Row(
                    ((var_y(child), 1), (var_y(node), -decay)),
                    0.0,
                    "le",
                    "decay",
                )
            )
        stack.extend(children.values())
    return sys


def _solve(sys: LPSystem, tol: float) -> np.ndarray | None:
    """Feasible point within additive slack tol per (row-normalized)
    constraint, or None when infeasible.  Raises SolverFailureError on a
    numerical breakdown, distinct from clean infeasibility."""
    if not sys.rows:
        return np.zeros(sys.n_vars)
    a_rows = []
    b = []
    for row in sys.rows:
        scale = max(abs(float(c)) for _, c in row.coeffs)
        if scale == 0:
            continue
        dense = np.zeros(sys.n_vars)
        for var, coef in row.coeffs:
            dense[var] += float(coef) / scale
        rhs = float(row.rhs) / scale
        a_rows.append(dense)
        b.append(rhs + tol)
        if row.kind == "eq":
            a_rows.append(-dense)
            b.append(-rhs + tol)
    res = linprog(
        c=np.zeros(sys.n_vars),
        A_ub=np.vstack(a_rows),
        b_ub=np.array(b),
        bounds=(0.0, 1.0),
        method="highs",
    )
    if res.status == 0:
        return res.x
    if res.status == 2:
        return None
    raise SolverFailureError(f"LP solver status {res.status}: {res.message}")


def feasible(sys: LPSystem, tol: float = DEFAULT_FEASIBILITY_TOL) -> bool:
    """Deterministic feasibility decision for the constraint system."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    return _solve(sys, tol) is not None


def solve_point(
    sys: LPSystem, tol: float = DEFAULT_FEASIBILITY_TOL
) -> np.ndarray | None:
    """A feasible point, when one exists (used by diagnostics and tests)."""
    return _solve(sys, tol)


def true_solution(
    tree: CouplingTree, counter: ConditionalCounter | None = None
) -> dict[int, tuple[Fraction, Fraction]]:
    """Oracle-exact values of both variables at every node.

    The root carries (1, 1); a child reached by the coupling atom
    (cx, cy) with mass kappa scales its parent by kappa / P[x-side
    colours cx] on the x variable, and symmetrically on y.  The
    conservation rows also range over colours whose conditional
    probability is zero, so the mass of such a colour is routed down the
    diagonal child (where no decay row caps it) as a canonical extension;
    these ghost branches keep every conservation row an exact identity.
    """
    if counter is None:
        counter = ConditionalCounter(tree.inst)
    values: dict[int, tuple[Fraction, Fraction]] = {}
    zero = Fraction(0)
    one = Fraction(1)

    # Entries: node, state, px, py, x-side is ghost mass, y-side is ghost.
    stack = [(tree.root, tree.root_state, one, one, False, False)]
    while stack:
        node, state, px, py, gx, gy = stack.pop()
        values[node.index] = (px, py)
        if node.status != "internal":
            continue
        u = node.u
        assert u is not None and node.children is not None
        need_true = (px > 0 and not gx) or (py > 0 and not gy)
        if need_true:
            # Positive non-ghost mass implies the node is reachable, so
            # both conditional laws exist.
            dist_x = counter.distribution(state.x, u)
            dist_y = counter.distribution(state.y, u)
            mass = {(cx, cy): m for cx, cy, m in coupling_atoms(counter, state, u)}
        for key, child in node.children.items():
            cx, cy = key
            cpx = cpy = zero
            cgx = cgy = False
            if px > 0:
                if gx:
                    if cx == cy:
                        cpx, cgx = px, True
                elif dist_x[cx] > 0:
                    kappa = mass.get(key, zero)
                    if kappa > 0:
                        cpx = px * kappa / dist_x[cx]
                elif cx == cy:
                    cpx, cgx = px, True
            if py > 0:
                if gy:
                    if cx == cy:
                        cpy, cgy = py, True
                elif dist_y[cy] > 0:
                    kappa = mass.get(key, zero)
                    if kappa > 0:
                        cpy = py * kappa / dist_y[cy]
                elif cx == cy:
                    cpy, cgy = py, True
            stack.append(
                (child, extend(state, u, cx, cy), cpx, cpy, cgx, cgy)
            )
    return values


@dataclass(frozen=True)
class RatioBracket:
    """A feasible bracket [r_lo, r_hi] with its truncation error gamma:
    the certified statement is exp(-gamma) r_lo <= ratio <= exp(gamma) r_hi."""

    r_lo: float
    r_hi: float
    gamma: float

    def point(self) -> float:
        """Geometric midpoint: symmetric multiplicative error."""
        return math.sqrt(self.r_lo * self.r_hi)

    def log_width(self) -> float:
        return math.log(self.r_hi / self.r_lo)


def binary_search_ratio(
    tree: CouplingTree,
    initial: RatioBracket | tuple[float, float],
    target_width: float,
    t_star: float,
    tol: float = DEFAULT_FEASIBILITY_TOL,
) -> RatioBracket:
    """Narrow a feasible bracket until its log-width drops to target_width.

    Each step tests the two geometric halves in order (low, high) and
    descends into the first feasible one.  The initial bracket must be
    feasible; both halves infeasible signals a tolerance or bracketing
    problem and raises.
    """
    if isinstance(initial, RatioBracket):
        lo, hi = initial.r_lo, initial.r_hi
    else:
        lo, hi = initial
    if not 0 < lo <= hi:
        raise ValueError("need 0 < r_lo <= r_hi")
    if target_width <= 0:
        raise ValueError("target width must be positive")
    probe = generate_lp(tree, lo, hi, t_star)
    if probe.is_vacuous:
        raise VacuousSystemError(
            "no halted leaves below the depth cap; the bracket is unconstrained"
        )
    if not feasible(probe, tol):
        raise InfeasibleBracketError(f"initial bracket [{lo}, {hi}] infeasible")
    while hi / lo > math.exp(target_width) * (1.0 + GUARD):
        mid = math.sqrt(lo * hi)
        if feasible(generate_lp(tree, lo, mid, t_star), tol):
            hi = mid
        elif feasible(generate_lp(tree, mid, hi, t_star), tol):
            lo = mid
        else:
            raise InfeasibleBracketError(
                f"both halves of [{lo}, {hi}] infeasible at width target {target_width}"
            )
    return RatioBracket(r_lo=lo, r_hi=hi, gamma=tree.gamma())


@dataclass(frozen=True)
class MarginalEstimate:
    """Aggregated output of the per-colour ratio searches."""

    p_hat: float
    bracket_lo: float
    bracket_hi: float
    gamma: float
    tree_nodes: int
    lp_constraints: int
    per_colour: tuple[tuple[int, float, float], ...]  # (colour, lo, hi)


def default_bracket(inst: Instance, k1: int, params: AlgoParams) -> tuple[float, float]:
    """Initial ratio bracket: the two-sided marginal-bound ratio when the
    admission check passes at t = t_star, else a wide configurable one."""
    k_prime = k1 - params.k2
    if k_prime >= 2 and inst.edges:
        threshold = (math.e * params.t_star * inst.delta) ** (1.0 / (k_prime - 1))
        if inst.q >= threshold * (1.0 + GUARD) and params.t_star > 1:
            mb = marginal_bounds(inst.q, Fraction(params.t_star))
            lo = float(mb.lower / mb.upper)
            return lo, 1.0 / lo
    return DEFAULT_BRACKET_DELTA, 1.0 / DEFAULT_BRACKET_DELTA


def estimate_marginal(
    inst: Instance,
    v: int,
    c: int,
    eps: float,
    params: AlgoParams,
    bracket: tuple[float, float] | None = None,
    node_budget: int = DEFAULT_NODE_BUDGET,
    leaf_budget: int = DEFAULT_ENUM_BUDGET,
    tol: float = DEFAULT_FEASIBILITY_TOL,
) -> MarginalEstimate:
    """Estimate Pr[sigma(v) = c] under the uniform distribution over
    proper colourings within a factor exp(+-eps).

    For every other colour c', a coupling tree rooted at (v: c', v: c) is
    built to depth params.L and the ratio of the two pinned counts is
    bracketed by binary search to log-width eps/2; the estimate is the
    inverse of the sum of the bracket midpoints (the c term contributing
    exactly 1).  Truncated trees add the bracket's gamma to the error, so
    the guarantee needs L large enough that gamma stays below eps/2.
    """
    if not 0 <= v < inst.n:
        raise ValueError(f"vertex {v} not in instance")
    if not 0 <= c < inst.q:
        raise ValueError(f"colour {c} out of range")
    if eps <= 0:
        raise ValueError("eps must be positive")
    if v not in inst.constrained_vertices():
        p = 1.0 / inst.q
        return MarginalEstimate(
            p_hat=p,
            bracket_lo=p,
            bracket_hi=p,
            gamma=0.0,
            tree_nodes=0,
            lp_constraints=0,
            per_colour=(),
        )
    k1 = inst.k_min
    if params.k2 >= k1:
        raise ValueError(
            f"k2={params.k2} must be below the smallest edge size {k1}"
        )
    start = bracket if bracket is not None else default_bracket(inst, k1, params)
    total = 1.0
    lo_sum = 1.0
    hi_sum = 1.0
    gamma = 0.0
    nodes = 0
    constraints = 0
    per_colour = []
    for c_prime in range(inst.q):
        if c_prime == c:
            continue
        tree = build_tree(
            inst,
            v,
            c_prime,
            c,
            k1,
            params.k2,
            params.L,
            node_budget=node_budget,
            leaf_budget=leaf_budget,
        )
        rb = binary_search_ratio(tree, start, eps / 2.0, params.t_star, tol)
        gamma = max(gamma, rb.gamma)
        nodes += tree.n_nodes
        constraints += len(generate_lp(tree, rb.r_lo, rb.r_hi, params.t_star).rows)
        total += rb.point()
        lo_sum += rb.r_lo * math.exp(-rb.gamma)
        hi_sum += rb.r_hi * math.exp(rb.gamma)
        per_colour.append((c_prime, rb.r_lo, rb.r_hi))
    return MarginalEstimate(
        p_hat=1.0 / total,
        bracket_lo=1.0 / hi_sum,
        bracket_hi=1.0 / lo_sum,
        gamma=gamma,
        tree_nodes=nodes,
        lp_constraints=constraints,
        per_colour=tuple(per_colour),
    )


class CachingMarginalEstimator:
    """Memoized wrapper around estimate_marginal for repeated sampling.

    Instances are hashable value objects, so (instance, vertex, colour,
    eps) keys the cache exactly; repeated draws on the same fixture then
    cost one dictionary lookup after the first estimate.
    """

    def __init__(self, params: AlgoParams, **kwargs):
        self.params = params
        self.kwargs = kwargs
        self._cache: dict[tuple[Instance, int, int, float], float] = {}

    def __call__(self, inst: Instance, v: int, c: int, eps: float) -> float:
        key = (inst, v, c, eps)
        hit = self._cache.get(key)
        if hit is None:
            hit = estimate_marginal(inst, v, c, eps, self.params, **self.kwargs).p_hat
            self._cache[key] = hit
        return hit
