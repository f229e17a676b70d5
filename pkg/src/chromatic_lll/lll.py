"""Local-lemma condition checks, marginal bounds, and resampling search.

The closed-form regime check compares q against (e*t*delta)^(1/(k'-1)); when
it passes, every marginal of the uniform distribution over proper
colourings lies within marginal_bounds(q, t).  The resampling search
(random initial colouring, recolour the first violated edge until none
remain) converges quickly in that regime and is also the fallback used to
produce arbitrary proper colourings elsewhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import ResampleLimitError
from .instance import Instance, is_proper

#: Relative guard band for threshold comparisons; ties fail closed.
GUARD = 1e-12

DEFAULT_MAX_RESAMPLES = 100_000


@dataclass(frozen=True)
class LLLCheckConfig:
    """Slack parameter t and the minimum edge size k' assumed by the check.

    The uniform weight 1/(t*delta) per edge is implied.
    """

    t: float
    k_prime: int


@dataclass(frozen=True)
class MarginalBounds:
    lower: Fraction
    upper: Fraction


def check_lll(inst: Instance, cfg: LLLCheckConfig) -> bool:
    """True iff q >= (e * t * delta)^(1/(k'-1)), with a 1e-12 relative
    guard band; ties resolve to false (fail closed)."""
    if cfg.k_prime < 2:
        raise ValueError("k_prime must be at least 2")
    if inst.edges and cfg.k_prime > inst.k_min:
        raise ValueError(f"k_prime {cfg.k_prime} exceeds smallest edge size {inst.k_min}")
    if inst.edges and cfg.t < inst.k_max:
        raise ValueError(f"slack t={cfg.t} below largest edge size {inst.k_max}")
    if not inst.edges:
        return True
    threshold = math.exp(math.log(math.e * cfg.t * inst.delta) / (cfg.k_prime - 1))
    return inst.q >= threshold * (1.0 + GUARD)


def verify_lll_weights(inst: Instance, x_weights: Sequence[float]) -> bool:
    """Edge-wise check of the asymmetric condition with arbitrary weights:
    Pr[e monochromatic] <= x(e) * prod_{e' meeting e} (1 - x(e')).

    Diagnostic companion to check_lll; probabilities are taken in the
    product measure where each vertex is coloured uniformly.
    """
    if len(x_weights) != len(inst.edges):
        raise ValueError("one weight per edge required")
    for w in x_weights:
        if not 0.0 < w < 1.0:
            raise ValueError("weights must lie in (0, 1)")
    members = [set(e) for e in inst.edges]
    for i, (e, p) in enumerate(zip(inst.edges, inst.pinnings)):
        if len(p) == 1:
            prob = float(inst.q) ** (-len(e))  # only the pinned colour works
        else:
            prob = float(inst.q) ** (1 - len(e))
        bound = x_weights[i]
        for j in range(len(inst.edges)):
            if j != i and members[i] & members[j]:
                bound *= 1.0 - x_weights[j]
        if prob > bound * (1.0 + GUARD):
            return False
    return True


def marginal_bounds(q: int, t) -> MarginalBounds:
    """Exact rational bounds (1 - 1/t)/q and (1 + 4/t)/q."""
    if q < 2:
        raise ValueError("q must be at least 2")
    t = Fraction(t)
    if t <= 1:
        raise ValueError("t must exceed 1")
    return MarginalBounds(lower=(1 - 1 / t) / q, upper=(1 + 4 / t) / q)


def moser_tardos(
    inst: Instance,
    rng: np.random.Generator,
    max_resamples: int = DEFAULT_MAX_RESAMPLES,
) -> tuple[int, ...]:
    """Find a proper colouring by resampling the first violated edge.

    Colours all vertices uniformly, then repeatedly recolours the
    (edge-order) first violated edge until none remains.  Raises
    ResampleLimitError after max_resamples recolourings.
    """
    sigma = [int(c) for c in rng.integers(inst.q, size=inst.n)]
    edges = [(e, p) for e, p in zip(inst.edges, inst.pinnings)]
    for _ in range(max_resamples + 1):
        violated = None
        for e, p in edges:
            if len({sigma[v] for v in e} | p) <= 1:
                violated = e
                break
        if violated is None:
            result = tuple(sigma)
            assert is_proper(inst, result)
            return result
        for v in violated:
            sigma[v] = int(rng.integers(inst.q))
    raise ResampleLimitError(f"no proper colouring after {max_resamples} resamples")


def _prefix(edge: tuple[int, ...], size: int) -> tuple[int, ...]:
    # Prefixes follow the global vertex order: pinning sweeps vertices in
    # index order, so these are the vertices pinned first.
    return tuple(sorted(edge)[:size])


def good_base_colouring(
    inst: Instance,
    k1c: int,
    rng: np.random.Generator,
    max_resamples: int = DEFAULT_MAX_RESAMPLES,
) -> tuple[int, ...]:
    """A proper colouring whose restriction to the first k - k1c vertices
    of every edge (global vertex order) is not monochromatic.

    Runs the resampling search on the truncated hypergraph whose edges are
    those prefixes.  Requires a k-uniform instance and 0 < k1c < k - 1.
    """
    if not inst.edges:
        return moser_tardos(inst, rng, max_resamples)
    k = inst.k_max
    if inst.k_min != k:
        raise ValueError("base colouring needs a uniform edge size")
    if not 0 < k1c < k - 1:
        raise ValueError(f"k1c must satisfy 0 < k1c < k-1 = {k - 1}")
    prefix_len = k - k1c
    prefixes = []
    seen = set()
    for e in inst.edges:
        pe = _prefix(e, prefix_len)
        if pe not in seen:  # identical prefixes impose identical constraints
            seen.add(pe)
            prefixes.append(pe)
    truncated = Instance(n=inst.n, q=inst.q, edges=tuple(prefixes))
    sigma = moser_tardos(truncated, rng, max_resamples)
    for e in inst.edges:
        assert len({sigma[v] for v in _prefix(e, prefix_len)}) > 1
    assert is_proper(inst, sigma)
    return sigma
