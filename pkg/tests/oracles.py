"""Deliberately naive oracles, independent of the package's search code."""

from __future__ import annotations

from itertools import combinations

from starpart.graph import Graph


def set_partitions(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]
        yield [[first]] + part


def homogeneous(g: Graph, block) -> bool:
    pairs = [g.has_edge(u, v) for u, v in combinations(block, 2)]
    return all(pairs) or not any(pairs)


def twin_free_pair(g: Graph, x, y, s: int) -> bool:
    for centres, leaves in ((x, y), (y, x)):
        for c1, c2 in combinations(centres, 2):
            p1 = {v for v in leaves if g.has_edge(c1, v) and not g.has_edge(c2, v)}
            p2 = {v for v in leaves if g.has_edge(c2, v) and not g.has_edge(c1, v)}
            if len(p1) >= s and len(p2) >= s:
                return False
    return True


def naive_min_blocks(g: Graph, k: int) -> int:
    best = None
    for part in set_partitions(list(range(g.n))):
        if best is not None and len(part) >= best:
            continue
        if not all(homogeneous(g, b) for b in part):
            continue
        if k >= 1 and not all(twin_free_pair(g, x, y, 2 * k - 1) for x, y in combinations(part, 2)):
            continue
        best = len(part)
    return best or 0
