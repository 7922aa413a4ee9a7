"""Shared fixtures: canonical small graphs and seeded random corpora."""

from __future__ import annotations

import numpy as np
import pytest

import bagofpaths as bp


def make_path_graph(n: int) -> bp.Graph:
    """Undirected path 0 - 1 - ... - (n-1) with unit affinities."""
    a = np.zeros((n, n))
    for i in range(n - 1):
        a[i, i + 1] = a[i + 1, i] = 1.0
    return bp.Graph.from_affinity(a, directed=False)


def make_cycle_graph(n: int, directed: bool = False) -> bp.Graph:
    a = np.zeros((n, n))
    for i in range(n):
        a[i, (i + 1) % n] = 1.0
        if not directed:
            a[(i + 1) % n, i] = 1.0
    return bp.Graph.from_affinity(a, directed=directed)


def make_two_clique() -> tuple[bp.Graph, bp.LabelAssignment, np.ndarray]:
    """Two 5-cliques joined by a single bridge edge (4, 5).

    Returns the graph, a seed assignment with nodes {0, 1} in class 0 and
    {5, 6} in class 1, and the ground-truth label vector.
    """
    a = np.zeros((10, 10))
    for block in (range(0, 5), range(5, 10)):
        for i in block:
            for j in block:
                if i != j:
                    a[i, j] = 1.0
    a[4, 5] = a[5, 4] = 1.0
    graph = bp.Graph.from_affinity(a, directed=False)
    seeds = bp.LabelAssignment.from_labels([0, 0, -1, -1, -1, 1, 1, -1, -1, -1], 2)
    truth = np.array([0] * 5 + [1] * 5)
    return graph, seeds, truth


def random_strong_graph(
    n: int, seed: int, directed: bool = True, p: float = 0.45
) -> bp.Graph:
    """A seeded random strongly connected graph with weights in [0.5, 2]."""
    rng = np.random.default_rng(seed)
    for _ in range(500):
        mask = rng.random((n, n)) < p
        weights = rng.uniform(0.5, 2.0, size=(n, n))
        a = np.where(mask, weights, 0.0)
        np.fill_diagonal(a, 0.0)
        if not directed:
            upper = np.triu(a, 1)
            a = upper + upper.T
        if bp.is_strongly_connected(a):
            return bp.Graph.from_affinity(a, directed=directed)
    raise RuntimeError(f"could not sample a strongly connected graph (n={n}, seed={seed})")


@pytest.fixture
def two_clique():
    return make_two_clique()


@pytest.fixture
def path4():
    return make_path_graph(4)
