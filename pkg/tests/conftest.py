from __future__ import annotations

import random
import sys

import networkx as nx
import pytest

from starpart.graph import BipartiteGraph, Graph


def to_nx(g: Graph) -> nx.Graph:
    h = nx.Graph()
    h.add_nodes_from(range(g.n))
    h.add_edges_from(g.edges())
    return h


def from_nx(h: nx.Graph) -> Graph:
    idx = {v: i for i, v in enumerate(sorted(h.nodes()))}
    return Graph.from_edges(len(idx), [(idx[u], idx[v]) for u, v in h.edges()])


def random_graph(rng: random.Random, n: int, p: float = 0.5) -> Graph:
    return Graph.from_edges(n, [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p])


def random_bipartite(rng: random.Random, a: int, b: int, p: float = 0.5) -> BipartiteGraph:
    return BipartiteGraph(a, b, tuple(sum(1 << j for j in range(b) if rng.random() < p) for _ in range(a)))


def all_bipartite(a: int, b: int):
    """Every labelled bipartite graph with sides a, b."""
    from itertools import product

    for rows in product(range(1 << b), repeat=a):
        yield BipartiteGraph(a, b, tuple(rows))


def cycle(n: int) -> Graph:
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def path(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


@pytest.fixture
def rng():
    return random.Random(20261019)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in mod.RESULTS:
            terminalreporter.write_line(line)
