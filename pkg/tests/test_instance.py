import numpy as np
import pytest

from chromatic_lll import (
    Instance,
    edge_satisfied,
    enumerate_proper,
    is_proper,
    parse_instance,
    pin_vertex,
    serialize_instance,
)
from chromatic_lll.errors import ParseError

from helpers import random_instance


def test_parse_minimal():
    inst = parse_instance("colours 2\nvertices 3\nedge 0 1 2")
    assert inst.n == 3 and inst.q == 2
    assert inst.edges == ((0, 1, 2),)
    assert inst.delta == 1


def test_parse_two_edges_shared_vertices():
    inst = parse_instance("colours 3\nvertices 4\nedge 0 1 2\nedge 1 2 3")
    assert inst.delta == 2
    assert inst.k_min == inst.k_max == 3


def test_parse_index_out_of_range():
    with pytest.raises(ParseError) as err:
        parse_instance("colours 2\nvertices 3\nedge 0 1 5")
    assert err.value.line == 3


def test_parse_duplicate_vertex():
    with pytest.raises(ParseError):
        parse_instance("colours 2\nvertices 3\nedge 0 1 1")


def test_parse_pin_colour_out_of_range():
    with pytest.raises(ParseError):
        parse_instance("colours 2\nvertices 3\nedge 0 1 2\npin 0 5")


def test_parse_comments_and_blank_lines():
    text = "# header\ncolours 2\n\nvertices 3  # trailing\nedge 0 1 2\n"
    inst = parse_instance(text)
    assert inst.edges == ((0, 1, 2),)


def test_satisfied_pinning_dropped_at_construction():
    inst = Instance(n=3, q=3, edges=((0, 1, 2),), pinnings=(frozenset({0, 1}),))
    assert inst.edges == ()


def test_roundtrip_fixture(pinned_single_edge):
    assert parse_instance(serialize_instance(pinned_single_edge)) == pinned_single_edge


def test_roundtrip_random_sweep():
    rng = np.random.default_rng(2024)
    for _ in range(40):
        inst = random_instance(rng, with_pins=True)
        text = serialize_instance(inst)
        again = parse_instance(text)
        assert again == inst
        assert serialize_instance(again) == text


def test_is_proper_examples(single_edge):
    assert not is_proper(single_edge, (0, 0, 0))
    assert is_proper(single_edge, (0, 0, 1))
    pinned = Instance(n=3, q=2, edges=((0, 1, 2),), pinnings=(frozenset({0}),))
    assert is_proper(pinned, (1, 1, 1))


def test_edge_satisfied_examples(single_edge):
    assert not edge_satisfied(single_edge, 0, {0: 0})
    assert edge_satisfied(single_edge, 0, {0: 0, 1: 1})
    pinned = Instance(n=3, q=2, edges=((0, 1, 2),), pinnings=(frozenset({0}),))
    assert edge_satisfied(pinned, 0, {1: 1})
    with pytest.raises(IndexError):
        edge_satisfied(single_edge, 3, {})


def test_pin_vertex_examples(single_edge):
    pinned = pin_vertex(single_edge, 0, 0)
    assert pinned.edges == ((1, 2),)
    assert pinned.pinnings == (frozenset({0}),)
    gone = pin_vertex(pinned, 1, 1)
    assert gone.edges == ()


def test_pin_vertex_locality(disjoint_pair):
    pinned = pin_vertex(disjoint_pair, 0, 0)
    assert pinned.edges[-1] == (3, 4, 5)
    assert pinned.pinnings[-1] == frozenset()


def test_pin_vertex_validation(single_edge):
    with pytest.raises(ValueError):
        pin_vertex(single_edge, 9, 0)
    with pytest.raises(ValueError):
        pin_vertex(single_edge, 0, 5)


def test_pin_never_grows_anything():
    rng = np.random.default_rng(7)
    for _ in range(25):
        inst = random_instance(rng, with_pins=True)
        v = int(rng.integers(inst.n))
        c = int(rng.integers(inst.q))
        pinned = pin_vertex(inst, v, c)
        assert pinned.k_max <= inst.k_max
        assert pinned.delta <= inst.delta
        assert len(pinned.edges) <= len(inst.edges)


def test_pin_preserves_properness():
    rng = np.random.default_rng(11)
    done = 0
    while done < 15:
        inst = random_instance(rng, n_max=6, with_pins=True)
        sigmas = list(enumerate_proper(inst))
        if not sigmas:
            continue
        sigma = sigmas[int(rng.integers(len(sigmas)))]
        v = int(rng.integers(inst.n))
        pinned = pin_vertex(inst, v, sigma[v])
        rest = {u: sigma[u] for u in range(inst.n) if u != v}
        assert is_proper(pinned, rest)
        done += 1


def test_q_one_instances_allowed():
    inst = Instance(n=3, q=1, edges=((0, 1, 2),))
    assert not is_proper(inst, (0, 0, 0))
