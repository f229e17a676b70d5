import pytest

from chromatic_lll import Instance


@pytest.fixture
def single_edge() -> Instance:
    """One edge on three vertices, two colours; 6 proper colourings."""
    return Instance(n=3, q=2, edges=((0, 1, 2),))


@pytest.fixture
def single_edge_q3() -> Instance:
    return Instance(n=3, q=3, edges=((0, 1, 2),))


@pytest.fixture
def pinned_single_edge() -> Instance:
    """Single edge with colour 0 pinned; marginal of (v0, c0) is 3/7."""
    return Instance(n=3, q=2, edges=((0, 1, 2),), pinnings=(frozenset({0}),))


@pytest.fixture
def chain() -> Instance:
    """Two overlapping edges on four vertices, three colours; 66 colourings."""
    return Instance(n=4, q=3, edges=((0, 1, 2), (1, 2, 3)))


@pytest.fixture
def disjoint_pair() -> Instance:
    return Instance(n=6, q=2, edges=((0, 1, 2), (3, 4, 5)))
