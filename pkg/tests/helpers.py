"""Shared test utilities: seeded instance generators and statistics."""

from __future__ import annotations

from itertools import combinations

import numpy as np

from chromatic_lll import Instance, SimpleGraph


def random_instance(
    rng: np.random.Generator,
    n_max: int = 8,
    q_max: int = 3,
    k: int = 3,
    max_edges: int = 4,
    with_pins: bool = False,
) -> Instance:
    """A small random k-uniform instance with distinct edges."""
    n = int(rng.integers(k, n_max + 1))
    q = int(rng.integers(2, q_max + 1))
    pool = list(combinations(range(n), k))
    rng.shuffle(pool)
    m = int(rng.integers(1, min(max_edges, len(pool)) + 1))
    edges = tuple(tuple(e) for e in pool[:m])
    if with_pins:
        pins = tuple(
            frozenset({int(rng.integers(q))}) if rng.random() < 0.3 else frozenset()
            for _ in edges
        )
    else:
        pins = ()
    return Instance(n=n, q=q, edges=edges, pinnings=pins)


def random_graph(rng: np.random.Generator, n: int, max_degree: int) -> SimpleGraph:
    """Random simple graph with max degree capped."""
    degree = [0] * n
    edges = []
    pairs = list(combinations(range(n), 2))
    rng.shuffle(pairs)
    for u, v in pairs:
        if degree[u] < max_degree and degree[v] < max_degree and rng.random() < 0.5:
            edges.append((u, v))
            degree[u] += 1
            degree[v] += 1
    return SimpleGraph.from_edges(n, edges)


def tv_distance(counts: dict, total: int, support: list) -> float:
    """Total variation distance between empirical counts and uniform."""
    u = 1.0 / len(support)
    keys = set(support) | set(counts)
    return 0.5 * sum(abs(counts.get(s, 0) / total - (u if s in support else 0.0)) for s in keys)
