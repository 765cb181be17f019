"""Independent checks of labelled partitions, exhaustive oracles and labelled counting.

Nothing here trusts the partitioners: block kinds are re-tested on the host,
every declared guarantee is re-detected on the induced bipartite graph, and
``brute_force_min_blocks`` searches set partitions directly.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from itertools import combinations, permutations
from typing import Iterable, Iterator, Sequence

from .errors import ArgumentError, SizeLimitError
from .graph import BipartiteGraph, Graph, LabelledPartition, bits
from .patterns import PatternSpec, detect_bipartite, find_induced, parse_pattern_list

EXCEEDS_CAP = "exceeds_cap"


# ---------------------------------------------------------------------------
# Partition verification
# ---------------------------------------------------------------------------


def _twin_star_specs(k: int) -> list[PatternSpec]:
    s = 2 * k - 1
    return [PatternSpec("bip_lambda", 2, s), PatternSpec("bip_up", 2, s)]


def _block_failure(g: Graph | BipartiteGraph, idx: int, kind: str, vs: Sequence[int], side: str) -> dict | None:
    if kind == "unconstrained":
        return None
    if isinstance(g, BipartiteGraph):
        # one side of a bipartite graph is always independent
        if kind == "independent" or len(vs) <= 1:
            return None
        return {"i": idx, "kind": kind, "witness": list(vs[:2])}
    for u, v in combinations(vs, 2):
        if g.has_edge(u, v) != (kind == "clique"):
            return {"i": idx, "kind": kind, "witness": [u, v]}
    return None


def _pair_graph(g: Graph | BipartiteGraph, p: LabelledPartition, i: int, j: int):
    """Bipartite graph between blocks ``i`` (top role) and ``j``, with its host ids, or None."""
    bi, bj = p.blocks[i], p.blocks[j]
    if isinstance(g, Graph):
        return g.bipartite_between(bi.vertices, bj.vertices), bi.vertices, bj.vertices
    if bi.side == "top" and bj.side == "bottom":
        return g.induced(bi.vertices, bj.vertices), bi.vertices, bj.vertices
    if bi.side == "bottom" and bj.side == "top":
        return g.induced(bj.vertices, bi.vertices).swap_sides(), bi.vertices, bj.vertices
    return None  # same side: no edges at all


def _pair_failure(sub, tops, bottoms, i: int, j: int, spec: PatternSpec) -> dict | None:
    emb = detect_bipartite(sub, spec)
    if emb is None:
        return None
    top = [tops[v] for v in emb.top]
    bottom = [bottoms[v] for v in emb.bottom]
    return {"i": i, "j": j, "pattern": spec.name, "witness": top + bottom, "top": top, "bottom": bottom}


def verify_partition(g: Graph | BipartiteGraph, p: LabelledPartition, k: int | None = None) -> dict:
    """Re-check block kinds and declared pair guarantees.

    With ``k >= 1`` every cross pair must additionally avoid ``2Λ_{2k-1}`` and
    ``2⊓_{2k-1}``, whether or not a guarantee was declared for it.
    """
    p.check_covers(g)
    block_failures = []
    for idx, blk in enumerate(p.blocks):
        fail = _block_failure(g, idx, blk.kind, blk.vertices, blk.side)
        if fail:
            block_failures.append(fail)

    pair_failures = []
    nb = len(p.blocks)
    for gt in p.guarantees:
        if not (0 <= gt.i < nb and 0 <= gt.j < nb) or gt.i == gt.j:
            raise ArgumentError(f"guarantee names invalid block pair ({gt.i}, {gt.j})")
        specs = parse_pattern_list(gt.free, bipartite=True)
        pair = _pair_graph(g, p, gt.i, gt.j)
        if pair is None:
            continue
        for spec in specs:
            fail = _pair_failure(*pair, gt.i, gt.j, spec)
            if fail:
                pair_failures.append(fail)
                break

    if k is not None and k >= 1:
        for i, j in combinations(range(nb), 2):
            pair = _pair_graph(g, p, i, j)
            if pair is None:
                continue
            for spec in _twin_star_specs(k):
                fail = _pair_failure(*pair, i, j, spec)
                if fail:
                    pair_failures.append(fail)
                    break

    return {
        "verdict": not block_failures and not pair_failures,
        "block_failures": block_failures,
        "pair_failures": pair_failures,
    }


# ---------------------------------------------------------------------------
# Exhaustive minimum (t, k)-partition
# ---------------------------------------------------------------------------


def _twin_free(g: Graph, x: int, y: int, s: int) -> bool:
    """No two centres in ``x`` with ``s`` private neighbours each inside ``y``, and vice versa."""
    for centres, leaves in ((x, y), (y, x)):
        rows = [g.adj[v] & leaves for v in bits(centres)]
        for r1, r2 in combinations(rows, 2):
            if (r1 & ~r2).bit_count() >= s and (r2 & ~r1).bit_count() >= s:
                return False
    return True


def brute_force_min_blocks(g: Graph, k: int, cap: int, max_vertices: int = 10) -> int | str:
    """Least ``t <= cap`` admitting a ``(t, k)``-partition, else :data:`EXCEEDS_CAP`.

    Blocks are cliques or independent sets; with ``k >= 1`` every pair of
    blocks must induce a ``(2Λ_{2k-1}, 2⊓_{2k-1})``-free bipartite graph, with
    ``k = 0`` only the kinds are required (cochromatic number).
    """
    if g.n > max_vertices:
        raise SizeLimitError(f"{g.n} vertices exceed the oracle limit of {max_vertices}")
    if cap < 0 or k < 0:
        raise ArgumentError("cap and k must be non-negative")
    if g.n == 0:
        return 0
    s = 2 * k - 1

    def search(v: int, t: int, masks: list[int], kinds: list[int]) -> bool:
        if v == g.n:
            return True
        adj = g.adj[v]
        for b in range(len(masks) + (len(masks) < t)):
            new = b == len(masks)
            mask = 0 if new else masks[b]
            # kinds: bit 0 clique possible, bit 1 independent possible
            old_kind = kind = 3 if new else kinds[b]
            if mask & ~adj:
                kind &= ~1
            if mask & adj:
                kind &= ~2
            if not kind:
                continue
            nm = mask | 1 << v
            if k >= 1 and not all(_twin_free(g, nm, other, s) for c, other in enumerate(masks) if c != b):
                continue
            if new:
                masks.append(nm)
                kinds.append(kind)
            else:
                masks[b], kinds[b] = nm, kind
            if search(v + 1, t, masks, kinds):
                return True
            if new:
                masks.pop()
                kinds.pop()
            else:
                masks[b], kinds[b] = mask, old_kind
        return False

    for t in range(1, cap + 1):
        if search(0, t, [], []):
            return t
    return EXCEEDS_CAP


# ---------------------------------------------------------------------------
# Labelled counting
# ---------------------------------------------------------------------------


def _require_general(specs: Sequence[PatternSpec]) -> None:
    for spec in specs:
        if spec.bipartite:
            raise ArgumentError(f"{spec.name} is a bipartite pattern; counting is over general graphs")


def is_member(g: Graph, specs: Iterable[PatternSpec]) -> bool:
    return all(find_induced(g, spec) is None for spec in specs)


def _graph_of_code(n: int, code: int, pairs: Sequence[tuple[int, int]]) -> Graph:
    # bit e of the code (most significant first) is the e-th pair in lexicographic order
    m = len(pairs)
    return Graph.from_edges(n, [pairs[e] for e in range(m) if code >> (m - 1 - e) & 1])


def _count_shard(args) -> int:
    specs, n, shard, shard_bits = args
    pairs = list(combinations(range(n), 2))
    low = len(pairs) - shard_bits
    total = 0
    for rest in range(1 << low):
        if is_member(_graph_of_code(n, shard << low | rest, pairs), specs):
            total += 1
    return total


def _count_brute(specs, n: int, jobs: int) -> int:
    m = n * (n - 1) // 2
    shard_bits = min(m, max(0, (max(jobs, 1) * 4 - 1).bit_length())) if jobs > 1 else 0
    tasks = [(list(specs), n, shard, shard_bits) for shard in range(1 << shard_bits)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return sum(pool.map(_count_shard, tasks))
    return sum(map(_count_shard, tasks))


def _automorphisms(nxg) -> int:
    from networkx.algorithms.isomorphism import GraphMatcher

    return sum(1 for _ in GraphMatcher(nxg, nxg).isomorphisms_iter())


def _atlas_item(args) -> int:
    specs, n, edges = args
    g = Graph.from_edges(n, edges)
    if not is_member(g, specs):
        return 0
    import networkx as nx

    h = nx.Graph()
    h.add_nodes_from(range(n))
    h.add_edges_from(edges)
    return math.factorial(n) // _automorphisms(h)


def _count_atlas(specs, n: int, jobs: int) -> int:
    from networkx.generators.atlas import graph_atlas_g

    tasks = [(list(specs), n, [tuple(e) for e in h.edges()]) for h in graph_atlas_g() if h.number_of_nodes() == n]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return sum(pool.map(_atlas_item, tasks, chunksize=16))
    return sum(map(_atlas_item, tasks))


def count_labelled(specs: Sequence[PatternSpec], n: int, method: str = "atlas", jobs: int = 1, cap: int = 7) -> int:
    """Number of graphs on ``{0..n-1}`` containing none of ``specs``.

    ``brute`` runs over all ``2^(n choose 2)`` edge codes in lexicographic
    order, sharded by the high-order code bits when ``jobs > 1``.  ``atlas``
    runs over one graph per isomorphism class (networkx atlas, ``n <= 7``) and
    weighs each member by ``n! / |Aut|``.
    """
    specs = list(specs)
    _require_general(specs)
    if n < 0:
        raise ArgumentError("n must be non-negative")
    if n > cap:
        raise SizeLimitError(f"n = {n} exceeds the counting cap {cap}")
    if method == "brute":
        return _count_brute(specs, n, jobs)
    if method == "atlas":
        if n > 7:
            raise SizeLimitError("the graph atlas covers n <= 7 only")
        return _count_atlas(specs, n, jobs)
    raise ArgumentError(f"unknown counting method {method!r}")


# ---------------------------------------------------------------------------
# Class members up to isomorphism (hereditary extension)
# ---------------------------------------------------------------------------


def _bip_canon(b: BipartiteGraph) -> tuple:
    rows, cols = b.rows, b.cols
    a, m = b.a_size, b.b_size
    if a <= m:
        # permute the top side, then sort the bottom columns
        best = None
        for perm in permutations(range(a)):
            key = tuple(sorted(sum(1 << perm[i] for i in bits(c)) for c in cols))
            if best is None or key < best:
                best = key
        return (a, m, "c", best)
    best = None
    for perm in permutations(range(m)):
        key = tuple(sorted(sum(1 << perm[j] for j in bits(r)) for r in rows))
        if best is None or key < best:
            best = key
    return (a, m, "r", best)


def bipartite_members(specs: Sequence[PatternSpec], max_total: int) -> Iterator[BipartiteGraph]:
    """All bipartite graphs with ``|A| + |B| <= max_total`` avoiding ``specs``, one per side-preserving isomorphism class."""
    seen = {_bip_canon(BipartiteGraph(0, 0, ()))}
    level = [BipartiteGraph(0, 0, ())]
    yield level[0]
    for _ in range(max_total):
        nxt = []
        for b in level:
            cands = []
            for mask in range(1 << b.b_size):
                cands.append(BipartiteGraph(b.a_size + 1, b.b_size, b.rows + (mask,)))
            for mask in range(1 << b.a_size):
                rows = tuple(r | (1 << b.b_size if mask >> i & 1 else 0) for i, r in enumerate(b.rows))
                cands.append(BipartiteGraph(b.a_size, b.b_size + 1, rows))
            for c in cands:
                key = _bip_canon(c)
                if key in seen:
                    continue
                seen.add(key)
                if all(detect_bipartite(c, spec) is None for spec in specs):
                    nxt.append(c)
                    yield c
        level = nxt


def graph_members(specs: Sequence[PatternSpec], max_n: int) -> Iterator[Graph]:
    """All graphs on at most ``max_n`` vertices avoiding ``specs``, one per isomorphism class."""
    import networkx as nx

    def to_nx(g: Graph):
        h = nx.Graph()
        h.add_nodes_from(range(g.n))
        h.add_edges_from(g.edges())
        return h

    level = [Graph.empty(0)]
    yield level[0]
    for n in range(1, max_n + 1):
        buckets: dict[str, list] = {}
        nxt = []
        for g in level:
            for mask in range(1 << g.n):
                c = Graph.from_edges(n, g.edges() + [(v, n - 1) for v in bits(mask)])
                if not is_member(c, specs):
                    continue
                h = to_nx(c)
                key = nx.weisfeiler_lehman_graph_hash(h, iterations=3)
                bucket = buckets.setdefault(key, [])
                if any(nx.is_isomorphic(h, other) for other in bucket):
                    continue
                bucket.append(h)
                nxt.append(c)
                yield c
        level = nxt
