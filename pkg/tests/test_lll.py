from fractions import Fraction

import numpy as np
import pytest

from chromatic_lll import (
    Instance,
    LLLCheckConfig,
    check_lll,
    good_base_colouring,
    is_proper,
    marginal_bounds,
    moser_tardos,
    verify_lll_weights,
)
from chromatic_lll.errors import ResampleLimitError


def _chain_with_q(q: int) -> Instance:
    return Instance(n=4, q=q, edges=((0, 1, 2), (1, 2, 3)))


def test_check_lll_threshold_examples():
    # k'=3, delta=2, t=3: threshold sqrt(6e) ~ 4.0385.
    assert check_lll(_chain_with_q(5), LLLCheckConfig(t=3, k_prime=3))
    assert not check_lll(_chain_with_q(4), LLLCheckConfig(t=3, k_prime=3))


def test_check_lll_small_edge():
    # delta=1, t=2, k'=2: threshold 2e ~ 5.44; q=2 fails.
    inst = Instance(n=2, q=2, edges=((0, 1),))
    assert not check_lll(inst, LLLCheckConfig(t=2, k_prime=2))
    big_q = Instance(n=2, q=6, edges=((0, 1),))
    assert check_lll(big_q, LLLCheckConfig(t=2, k_prime=2))


def test_check_lll_validation():
    inst = _chain_with_q(5)
    with pytest.raises(ValueError):
        check_lll(inst, LLLCheckConfig(t=3, k_prime=1))
    with pytest.raises(ValueError):
        check_lll(inst, LLLCheckConfig(t=2, k_prime=3))  # t below k_max


def test_verify_lll_weights(single_edge_q3):
    # x(e) = 1/(t*delta) with t=3, delta=1 passes for q=3, k=3.
    assert verify_lll_weights(single_edge_q3, [1.0 / 3.0])
    crowded = Instance(n=3, q=2, edges=((0, 1, 2),))
    # q=2: Pr[mono] = 1/4 > x(1-x) for x = 1/5.
    assert not verify_lll_weights(crowded, [0.2])


def test_marginal_bounds_examples():
    b = marginal_bounds(10, 5)
    assert (b.lower, b.upper) == (Fraction(2, 25), Fraction(9, 50))
    b2 = marginal_bounds(2, 2)
    assert (b2.lower, b2.upper) == (Fraction(1, 4), Fraction(3, 4))
    huge = marginal_bounds(10, 10**9)
    assert abs(float(huge.lower) - 0.1) < 1e-8
    assert abs(float(huge.upper) - 0.1) < 1e-8


def test_moser_tardos_no_edges():
    inst = Instance(n=4, q=3)
    sigma = moser_tardos(inst, np.random.default_rng(0))
    assert len(sigma) == 4


def test_moser_tardos_single_edge(single_edge):
    sigma = moser_tardos(single_edge, np.random.default_rng(1))
    assert is_proper(single_edge, sigma)


def test_moser_tardos_impossible():
    broken = Instance(n=3, q=1, edges=((0, 1, 2),))
    with pytest.raises(ResampleLimitError):
        moser_tardos(broken, np.random.default_rng(2), max_resamples=50)


def test_moser_tardos_deterministic(chain):
    a = moser_tardos(chain, np.random.default_rng(5))
    b = moser_tardos(chain, np.random.default_rng(5))
    assert a == b


def test_good_base_colouring_prefix(chain):
    sigma = good_base_colouring(chain, 1, np.random.default_rng(3))
    for e in chain.edges:
        prefix = sorted(e)[:2]
        assert len({sigma[v] for v in prefix}) > 1
    assert is_proper(chain, sigma)


def test_good_base_colouring_disjoint(disjoint_pair):
    sigma = good_base_colouring(disjoint_pair, 1, np.random.default_rng(4))
    for e in disjoint_pair.edges:
        assert len({sigma[v] for v in sorted(e)[:2]}) > 1


def test_good_base_colouring_impossible():
    broken = Instance(n=3, q=1, edges=((0, 1, 2),))
    with pytest.raises(ResampleLimitError):
        good_base_colouring(broken, 1, np.random.default_rng(6), max_resamples=50)


def test_good_base_colouring_validation(chain):
    with pytest.raises(ValueError):
        good_base_colouring(chain, 2, np.random.default_rng(0))  # k1c = k-1
    with pytest.raises(ValueError):
        good_base_colouring(chain, 0, np.random.default_rng(0))
