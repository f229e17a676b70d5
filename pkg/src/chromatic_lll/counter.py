"""Approximate counting by self-reduction along a good base colouring.

A base colouring whose edge prefixes are never monochromatic lets us pin
vertices one at a time, in global order, without any edge surviving below
k1 vertices: the inverse of the product of the pinned colours' marginals,
times q per never-pinned vertex, is exactly the number of proper
colourings.  Estimating each marginal within exp(+-eps/n) yields a count
within exp(+-eps).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .errors import PinSequenceError
from .instance import Instance, is_proper, pin_vertex
from .lll import DEFAULT_MAX_RESAMPLES, good_base_colouring
from .lp import estimate_marginal
from .oracle import DEFAULT_ENUM_BUDGET, exact_marginal
from .params import AlgoParams


class PinStep(NamedTuple):
    """The instance right before pinning, plus the pin applied to it."""

    instance: Instance
    vertex: int
    colour: int


@dataclass(frozen=True)
class CountEstimate:
    """log Z-hat together with the per-step marginal estimates.

    log_estimate = -sum(ln p_i) + free_vertices * ln q.  exact_estimate is
    populated in oracle-marginal mode, where the telescoping product is
    carried as an exact rational and equals the true count.
    """

    log_estimate: float
    eps: float
    per_step: tuple[tuple[int, int, float], ...]  # (vertex, colour, p_hat)
    free_vertices: int
    exact_estimate: Fraction | None = None

    @property
    def estimate(self) -> float | None:
        """exp(log_estimate) when it fits a double."""
        try:
            return math.exp(self.log_estimate)
        except OverflowError:
            return None


def pinned_sequence(
    inst: Instance,
    sigma: Sequence[int],
    min_edge_size: int | None = None,
) -> list[PinStep]:
    """Pin vertices to sigma in global order until no edges remain.

    Each step picks the first vertex contained in a surviving edge, pins
    it, and drops the edges the pin satisfies.  With min_edge_size given,
    any intermediate edge falling below that size raises PinSequenceError
    (the base colouring was not prefix-proper for that k1).
    """
    steps: list[PinStep] = []
    work = inst
    while work.edges:
        in_edges = {u for e in work.edges for u in e}
        u = min(in_edges)
        steps.append(PinStep(instance=work, vertex=u, colour=sigma[u]))
        work = pin_vertex(work, u, sigma[u])
        if min_edge_size is not None and work.edges and work.k_min < min_edge_size:
            raise PinSequenceError(
                f"edge shrank below {min_edge_size} after pinning vertex {u}"
            )
    return steps


def count(
    inst: Instance,
    eps: float,
    params: AlgoParams,
    rng: np.random.Generator,
    marginal_fn: Callable[[Instance, int, int, float], float] | None = None,
    oracle_marginals: bool = False,
    max_resamples: int = DEFAULT_MAX_RESAMPLES,
    oracle_budget: int = DEFAULT_ENUM_BUDGET,
    **estimate_kwargs,
) -> CountEstimate:
    """Estimate the number of proper colourings within exp(+-eps).

    Requires a k-uniform instance and 0 < k2 <= k1 <= k-2 so the base
    colouring exists and every pinned instance keeps its edges above k2.
    marginal_fn replaces the ratio-search estimator (signature: instance,
    vertex, colour, per-call eps -> float); oracle_marginals swaps in the
    exact enumeration oracle and tracks the telescoping product exactly.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    if inst.edges:
        k = inst.k_max
        if inst.k_min != k:
            raise ValueError("counting requires a uniform edge size")
        if not 0 < params.k2 <= params.k1 <= k - 2:
            raise ValueError(
                f"need 0 < k2 <= k1 <= k-2 = {k - 2} (got k1={params.k1}, k2={params.k2})"
            )
    n = inst.n
    eps_step = eps / max(n, 1)
    sigma = good_base_colouring(inst, params.k1, rng, max_resamples) if inst.edges else (
        tuple(int(c) for c in rng.integers(inst.q, size=n))
    )
    assert is_proper(inst, sigma)
    steps = pinned_sequence(inst, sigma, min_edge_size=params.k1)
    per_step = []
    log_sum = 0.0
    exact_product: Fraction | None = Fraction(1) if oracle_marginals else None
    for step in steps:
        u, c = step.vertex, step.colour
        if oracle_marginals:
            p_exact = exact_marginal(step.instance, u, c, oracle_budget)
            assert exact_product is not None
            exact_product *= p_exact
            p_hat = float(p_exact)
        elif marginal_fn is not None:
            p_hat = marginal_fn(step.instance, u, c, eps_step)
        else:
            p_hat = estimate_marginal(
                step.instance, u, c, eps_step, params, **estimate_kwargs
            ).p_hat
        per_step.append((u, c, p_hat))
        log_sum += math.log(p_hat)
    free = n - len(steps)
    log_estimate = -log_sum + free * math.log(inst.q)
    exact_estimate = None
    if oracle_marginals:
        assert exact_product is not None
        exact_estimate = Fraction(inst.q) ** free / exact_product
    return CountEstimate(
        log_estimate=log_estimate,
        eps=eps,
        per_step=tuple(per_step),
        free_vertices=free,
        exact_estimate=exact_estimate,
    )
