"""Seeded random graph generators for tests and experiments.

Uses the stdlib Mersenne generator so corpora are stable across platforms
and numpy versions.  Directed edges follow a random topological order, so
every generated graph is acyclic by construction.
"""

from __future__ import annotations

import random

from .graph import MixedGraph, build_graph


def _labels(n: int) -> list[str]:
    return [f"v{i}" for i in range(n)]


def random_dag(n: int, edge_prob: float, seed: int) -> MixedGraph:
    """Random DAG on n vertices; each forward pair is an edge with
    probability edge_prob."""
    rng = random.Random(seed)
    labels = _labels(n)
    order = labels[:]
    rng.shuffle(order)
    directed = []
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < edge_prob:
                directed.append((order[i], order[j]))
    return build_graph(labels, directed)


def random_mixed_graph(n: int, edge_prob: float, seed: int,
                       bidirected_frac: float = 1 / 3) -> MixedGraph:
    """Random mixed acyclic graph; a present edge is bidirected with
    probability bidirected_frac, otherwise directed along a random
    topological order."""
    rng = random.Random(seed)
    labels = _labels(n)
    order = labels[:]
    rng.shuffle(order)
    directed = []
    bidirected = []
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() >= edge_prob:
                continue
            if rng.random() < bidirected_frac:
                bidirected.append((order[i], order[j]))
            else:
                directed.append((order[i], order[j]))
    return build_graph(labels, directed, bidirected)
