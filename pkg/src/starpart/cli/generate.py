"""Random class members by vertex-at-a-time growth with rejection.

Every class handled here is hereditary, so a member can be grown one vertex
at a time: propose a vertex with a random neighbourhood and keep it only if
the graph stays free of the forbidden patterns.
"""

from __future__ import annotations

import random
from typing import Sequence

from ..graph import BipartiteGraph, Graph
from ..patterns import PatternSpec, contains


def _free(g, specs: Sequence[PatternSpec]) -> bool:
    return all(contains(g, spec) is None for spec in specs)


def random_bipartite_member(
    specs: Sequence[PatternSpec],
    a_max: int,
    b_max: int,
    rng: random.Random,
    density: float | None = None,
    tries: int = 80,
) -> BipartiteGraph:
    """Grow a bipartite graph with at most ``a_max`` top and ``b_max`` bottom vertices."""
    p = rng.uniform(0.2, 0.8) if density is None else density
    rows: list[int] = []
    b_size = 0
    for _ in range(tries):
        if len(rows) >= a_max and b_size >= b_max:
            break
        if len(rows) < a_max and (b_size >= b_max or rng.random() < 0.5):
            cand = rows + [sum(1 << j for j in range(b_size) if rng.random() < p)]
            nb = b_size
        else:
            cand = [r | (1 << b_size) if rng.random() < p else r for r in rows]
            nb = b_size + 1
        g = BipartiteGraph(len(cand), nb, tuple(cand))
        if _free(g, specs):
            rows, b_size = cand, nb
    return BipartiteGraph(len(rows), b_size, tuple(rows))


def random_graph_member(
    specs: Sequence[PatternSpec],
    n_max: int,
    rng: random.Random,
    density: float | None = None,
    tries: int = 80,
) -> Graph:
    """Grow a graph on at most ``n_max`` vertices."""
    p = rng.uniform(0.2, 0.8) if density is None else density
    g = Graph.empty(0)
    for _ in range(tries):
        if g.n >= n_max:
            break
        edges = g.edges() + [(v, g.n) for v in range(g.n) if rng.random() < p]
        cand = Graph.from_edges(g.n + 1, edges)
        if _free(cand, specs):
            g = cand
    return g


def random_block_bipartite(
    rng: random.Random,
    z: int,
    a_bag: tuple[int, int] = (3, 8),
    b_bag: tuple[int, int] = (1, 8),
    max_side: int | None = None,
) -> BipartiteGraph:
    """Template-shaped host: ``z`` bag pairs, each bag pair full, empty or random.

    Far-apart bags are only full or empty, consecutive ones may be random.  The
    result is not filtered; callers reject non-members.  These hosts reach the
    bottom-side covering case and multi-piece refinements that uniform random
    growth essentially never produces.
    """
    sa = [rng.randint(*a_bag) for _ in range(z)]
    sb = [rng.randint(*b_bag) for _ in range(z)]
    if max_side is not None:
        while sum(sa) > max_side:
            sa[sa.index(max(sa))] -= 1
        while sum(sb) > max_side:
            sb[sb.index(max(sb))] -= 1
    oa = [sum(sa[:i]) for i in range(z)]
    ob = [sum(sb[:i]) for i in range(z)]
    rows = [0] * sum(sa)
    for i in range(z):
        for j in range(z):
            kind = rng.choice("fe" if abs(i - j) > 1 else "fer")
            p = rng.random()
            for a in range(sa[i]):
                for b in range(sb[j]):
                    if kind == "f" or (kind == "r" and rng.random() < p):
                        rows[oa[i] + a] |= 1 << (ob[j] + b)
    return BipartiteGraph(sum(sa), sum(sb), tuple(rows))
