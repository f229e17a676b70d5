from collections import Counter
from fractions import Fraction

import numpy as np
import pytest

from chromatic_lll import (
    Instance,
    exact_count,
    exact_marginal,
    exact_ratio,
    exact_sample,
)
from chromatic_lll.errors import BudgetExceededError, EmptySupportError
from chromatic_lll.lll import LLLCheckConfig, check_lll, marginal_bounds
from chromatic_lll.oracle import ConditionalCounter

from helpers import random_instance


def test_count_free_vertices():
    assert exact_count(Instance(n=3, q=2)) == 8


def test_count_single_edge(single_edge):
    assert exact_count(single_edge) == 2**3 - 2


def test_count_chain(chain):
    # 81 - 9 - 9 + 3 by inclusion-exclusion over the two edges.
    assert exact_count(chain) == 66


def test_count_multiplies_over_disjoint_components(disjoint_pair):
    assert exact_count(disjoint_pair) == 6 * 6


def test_budget_guard():
    inst = Instance(n=25, q=2, edges=(tuple(range(25)),))
    with pytest.raises(BudgetExceededError):
        exact_count(inst, budget=1 << 10)


def test_marginal_symmetric(single_edge):
    assert exact_marginal(single_edge, 0, 0) == Fraction(1, 2)


def test_marginal_pinned(pinned_single_edge):
    assert exact_marginal(pinned_single_edge, 0, 0) == Fraction(3, 7)


def test_marginal_free_vertex():
    inst = Instance(n=2, q=3)
    assert exact_marginal(inst, 0, 1) == Fraction(1, 3)


def test_marginals_sum_to_one():
    rng = np.random.default_rng(5)
    for _ in range(10):
        inst = random_instance(rng, with_pins=True)
        if exact_count(inst) == 0:
            continue
        for v in range(inst.n):
            total = sum(exact_marginal(inst, v, c) for c in range(inst.q))
            assert total == 1


def test_ratio_examples(single_edge, pinned_single_edge):
    assert exact_ratio(single_edge, 0, 0, 1) == 1
    assert exact_ratio(pinned_single_edge, 0, 0, 1) == Fraction(3, 4)
    assert exact_ratio(Instance(n=4, q=3), 2, 0, 2) == 1


def test_ratio_matches_marginals(pinned_single_edge):
    m0 = exact_marginal(pinned_single_edge, 0, 0)
    m1 = exact_marginal(pinned_single_edge, 0, 1)
    assert m0 / m1 == exact_ratio(pinned_single_edge, 0, 0, 1)


def test_ratio_empty_denominator_distinct():
    broken = Instance(n=3, q=1, edges=((0, 1, 2),))
    with pytest.raises(EmptySupportError):
        exact_ratio(broken, 0, 0, 0)


def test_sample_deterministic(single_edge):
    a = exact_sample(single_edge, np.random.default_rng(99))
    b = exact_sample(single_edge, np.random.default_rng(99))
    assert a == b


def test_sample_uniform(single_edge):
    hist = Counter()
    runs = 60_000
    for i in range(runs):
        hist[exact_sample(single_edge, np.random.default_rng([1, i]))] += 1
    assert len(hist) == 6
    for colouring, count in hist.items():
        assert abs(count / runs - 1 / 6) < 0.02


def test_sample_empty_support():
    broken = Instance(n=3, q=1, edges=((0, 1, 2),))
    with pytest.raises(EmptySupportError):
        exact_sample(broken, np.random.default_rng(0))


def test_marginals_within_lll_bounds_when_check_passes(single_edge_q3):
    # delta=1, t=3, k'=3: threshold (3e)^(1/2) ~ 2.855 < q = 3.
    cfg = LLLCheckConfig(t=3, k_prime=3)
    assert check_lll(single_edge_q3, cfg)
    bounds = marginal_bounds(single_edge_q3.q, 3)
    for v in range(single_edge_q3.n):
        for c in range(single_edge_q3.q):
            m = exact_marginal(single_edge_q3, v, c)
            assert bounds.lower <= m <= bounds.upper


def test_conditional_counter_consistency(pinned_single_edge):
    counter = ConditionalCounter(pinned_single_edge)
    assert counter.count({}) == 7
    dist = counter.distribution({}, 0)
    assert dist == (Fraction(3, 7), Fraction(4, 7))


def test_conditional_counter_empty_support():
    broken = Instance(n=3, q=1, edges=((0, 1, 2),))
    counter = ConditionalCounter(broken)
    with pytest.raises(EmptySupportError):
        counter.distribution({}, 0)
