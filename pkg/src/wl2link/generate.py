"""Small graph constructors and seeded random graph generators."""

from __future__ import annotations

import random

import networkx as nx

from .graph import Graph


def path_graph(n: int) -> Graph:
    return Graph.build(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> Graph:
    return Graph.build(n, [(i, (i + 1) % n) for i in range(n)])


def complete_graph(n: int) -> Graph:
    return Graph.build(n, [(u, v) for u in range(n) for v in range(u + 1, n)])


def star_graph(leaves: int) -> Graph:
    return Graph.build(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def from_networkx(nxg) -> Graph:
    mapping = {v: i for i, v in enumerate(sorted(nxg.nodes()))}
    edges = [(mapping[u], mapping[v]) for u, v in nxg.edges() if u != v]
    return Graph.build(len(mapping), edges)


def erdos_renyi(n: int, p: float, seed: int) -> Graph:
    return from_networkx(nx.gnp_random_graph(n, p, seed=seed))


def ring_lattice(n: int, k: int, rewire: float, seed: int) -> Graph:
    """Watts-Strogatz ring lattice: n nodes, k nearest neighbors, rewired edges."""
    return from_networkx(nx.watts_strogatz_graph(n, k, rewire, seed=seed))


def random_permutation(n: int, rng: random.Random):
    pi = list(range(n))
    rng.shuffle(pi)
    return pi
