"""Almost-uniform sampling of proper colourings.

Vertices are coloured one at a time from their estimated marginal
distribution, but only while every edge at the vertex still has more than
k1 uncoloured vertices; once no vertex qualifies, the uncoloured residue
splits into connected components that are completed by exact enumeration.
If any residual component reaches the failure threshold
k^2 delta ln(2 n delta / eps) the run is flagged and an arbitrary proper
colouring is returned instead; in regime this happens with probability at
most eps/2, and the output distribution is within eps total variation of
uniform.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping

import numpy as np

from .errors import BudgetExceededError
from .instance import Instance, is_proper, pin_vertex
from .lll import DEFAULT_MAX_RESAMPLES, moser_tardos
from .lp import estimate_marginal
from .oracle import DEFAULT_ENUM_BUDGET, exact_sample
from .params import AlgoParams, sampler_component_threshold


@dataclass(frozen=True)
class SamplerOutcome:
    """One draw: the colouring, the decision path, the residual component
    sizes, and whether the run fell back to an arbitrary proper colouring
    (failure_reason: "component_too_large" or "enumeration_budget")."""

    colouring: tuple[int, ...]
    path: tuple[tuple[int, int], ...]
    residual_components: tuple[int, ...]
    failed: bool
    failure_reason: str | None = None


def eligible_vertex(
    inst: Instance, x: Mapping[int, int], k1s: int
) -> int | None:
    """First uncoloured vertex whose surviving edges all keep more than
    k1s uncoloured vertices; None when no edges remain or all uncoloured
    vertices are blocked.

    ``inst`` is the working instance: coloured vertices already pinned
    away, so edge sizes count uncoloured vertices.
    """
    if not inst.edges:
        return None
    small = {u for e in inst.edges if len(e) <= k1s for u in e}
    for v in range(inst.n):
        if v in x:
            continue
        if v not in small:
            return v
    return None


def residual_components(
    inst: Instance, x: Mapping[int, int]
) -> list[frozenset[int]]:
    """Connected components of the uncoloured vertices under the surviving
    edges, ordered by smallest member; isolated uncoloured vertices form
    singletons."""
    uncoloured = [v for v in range(inst.n) if v not in x]
    parent = {v: v for v in uncoloured}

    def find(v: int) -> int:
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for e in inst.edges:
        it = iter(e)
        first = find(next(it))
        for u in it:
            parent[find(u)] = first
    groups: dict[int, set[int]] = {}
    for v in uncoloured:
        groups.setdefault(find(v), set()).add(v)
    return [frozenset(g) for g in sorted(groups.values(), key=min)]


def _component_instance(work: Instance, component: frozenset[int]) -> Instance:
    edges = []
    pins = []
    for e, p in zip(work.edges, work.pinnings):
        if set(e) <= component:
            edges.append(e)
            pins.append(p)
    return Instance(n=work.n, q=work.q, edges=tuple(edges), pinnings=tuple(pins))


def sample(
    inst: Instance,
    eps: float,
    params: AlgoParams,
    rng: np.random.Generator,
    marginal_fn: Callable[[Instance, int, int, float], float] | None = None,
    max_resamples: int = DEFAULT_MAX_RESAMPLES,
    enum_budget: int = DEFAULT_ENUM_BUDGET,
    **estimate_kwargs,
) -> SamplerOutcome:
    """Draw one colouring; deterministic given the generator state.

    Requires a k-uniform instance and 0 < k2 < k1 <= k-1.  Each decision
    estimates the q marginals at the chosen vertex to accuracy eps/(2n),
    renormalizes, and samples; marginal_fn (same signature as in the
    counter) substitutes the estimator, e.g. with the exact oracle.
    """
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    if inst.edges:
        k = inst.k_max
        if inst.k_min != k:
            raise ValueError("sampling requires a uniform edge size")
        if not 0 < params.k2 < params.k1 <= k - 1:
            raise ValueError(
                f"need 0 < k2 < k1 <= k-1 = {k - 1} (got k1={params.k1}, k2={params.k2})"
            )
    n = inst.n
    q = inst.q
    eps_call = eps / (2 * max(n, 1))
    work = inst
    x: dict[int, int] = {}
    path: list[tuple[int, int]] = []
    while work.edges:
        v = eligible_vertex(work, x, params.k1)
        if v is None:
            break
        if v in {u for e in work.edges for u in e}:
            if marginal_fn is not None:
                raw = [marginal_fn(work, v, c, eps_call) for c in range(q)]
            else:
                raw = [
                    estimate_marginal(work, v, c, eps_call, params, **estimate_kwargs).p_hat
                    for c in range(q)
                ]
            total = sum(raw)
            probs = [p / total for p in raw]
        else:
            probs = [1.0 / q] * q
        r = rng.random()
        acc = 0.0
        choice = q - 1
        for c, p in enumerate(probs):
            acc += p
            if r < acc:
                choice = c
                break
        x[v] = choice
        path.append((v, choice))
        work = pin_vertex(work, v, choice)

    threshold = sampler_component_threshold(
        inst.k_max if inst.edges else 1, max(inst.delta, 1), n, eps
    )
    components = residual_components(work, x)
    sizes = tuple(len(c) for c in components)
    if any(s >= threshold for s in sizes):
        fallback = moser_tardos(inst, rng, max_resamples)
        return SamplerOutcome(
            colouring=fallback,
            path=tuple(path),
            residual_components=sizes,
            failed=True,
            failure_reason="component_too_large",
        )
    out = [0] * n
    for v, c in x.items():
        out[v] = c
    try:
        for component in components:
            sub = _component_instance(work, component)
            completion = exact_sample(sub, rng, enum_budget)
            for v in component:
                out[v] = completion[v]
    except BudgetExceededError:
        fallback = moser_tardos(inst, rng, max_resamples)
        return SamplerOutcome(
            colouring=fallback,
            path=tuple(path),
            residual_components=sizes,
            failed=True,
            failure_reason="enumeration_budget",
        )
    colouring = tuple(out)
    assert is_proper(inst, colouring)
    return SamplerOutcome(
        colouring=colouring,
        path=tuple(path),
        residual_components=sizes,
        failed=False,
    )
