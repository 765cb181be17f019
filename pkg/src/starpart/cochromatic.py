"""Partitions of general graphs into cliques and independent sets.

* :func:`cochromatic_2k2_c4` and :func:`cochromatic_matching` split graphs
  without a matching and a co-matching.
* :func:`matching_partition` refines such a split so that the bipartite graph
  between any two blocks is ``2K2``-free.
* :func:`cochromatic_star` finds a minimum clique/independent-set partition by
  branch and bound, for the star-free classes where only existence is known.
"""

from __future__ import annotations

from typing import Sequence

from . import bounds
from .errors import ArgumentError, ClassMembershipError, ContractError, SizeLimitError
from .graph import Graph, LabelledPartition, bits, complement, to_mask
from .matching import _matching_partition, matching
from .patterns import PatternSpec, family_F, find_induced
from .refine import general_partition, lift, refine_general

C4 = PatternSpec("co_nK2", 2)
TWO_K2 = PatternSpec("nK2", 2)


def _require_free(g: Graph, specs) -> None:
    for spec in specs:
        emb = find_induced(g, spec)
        if emb is not None:
            raise ClassMembershipError(spec.name, emb.to_json())


def _kind(g: Graph, block: Sequence[int]) -> str:
    mask = to_mask(block)
    if g.is_independent(mask):
        return "independent"
    if g.is_clique(mask):
        return "clique"
    raise ContractError(f"block {sorted(block)} is neither a clique nor independent")


def _flip(kind: str) -> str:
    return {"clique": "independent", "independent": "clique"}[kind]


def _partition(g: Graph, blocks: list[list[int]], kinds: list[str], meta: dict) -> LabelledPartition:
    for blk, kind in zip(blocks, kinds):
        mask = to_mask(blk)
        ok = g.is_clique(mask) if kind == "clique" else g.is_independent(mask)
        if not ok:
            raise ContractError(f"block {blk} is not {kind}")
    return general_partition(g, blocks, kinds, {}, meta)


# ---------------------------------------------------------------------------
# Matching / co-matching free graphs
# ---------------------------------------------------------------------------


def _swap_free_independent(g: Graph) -> int:
    """Maximal independent set with no improving swap of one member for two outsiders.

    Greedy by id, then while some ``x`` in the set is the only set-neighbour
    of two non-adjacent outsiders, trade ``x`` for them and re-extend.  Each
    swap grows the set, so this stops after at most ``n`` rounds.
    """
    x = 0

    def extend(x: int) -> int:
        for v in range(g.n):
            if not x >> v & 1 and not g.adj[v] & x:
                x |= 1 << v
        return x

    x = extend(x)
    while True:
        owners: dict[int, list[int]] = {}
        for v in range(g.n):
            hits = g.adj[v] & x
            if not x >> v & 1 and hits.bit_count() == 1:
                owners.setdefault(hits.bit_length() - 1, []).append(v)
        swap = None
        for w in sorted(owners):
            cands = owners[w]
            for i, y1 in enumerate(cands):
                for y2 in cands[i + 1:]:
                    if not g.adj[y1] >> y2 & 1:
                        swap = (w, y1, y2)
                        break
                if swap:
                    break
            if swap:
                break
        if swap is None:
            return x
        w, y1, y2 = swap
        x = extend((x & ~(1 << w)) | 1 << y1 | 1 << y2)


def _merge_homogeneous(g: Graph, blocks: list[list[int]], kinds: list[str]) -> tuple[list[list[int]], list[str]]:
    """Merge blocks while some union of two is still a clique or an independent set."""
    blocks, kinds = [list(b) for b in blocks], list(kinds)
    merged = True
    while merged:
        merged = False
        for i in range(len(blocks)):
            for j in range(i + 1, len(blocks)):
                mask = to_mask(blocks[i]) | to_mask(blocks[j])
                kind = "clique" if g.is_clique(mask) else "independent" if g.is_independent(mask) else None
                if kind:
                    blocks[i] = sorted(blocks[i] + blocks.pop(j))
                    kinds[i] = kind
                    kinds.pop(j)
                    merged = True
                    break
            if merged:
                break
    return blocks, kinds


def _split_2k2_c4(g: Graph) -> tuple[list[list[int]], list[str]]:
    x = _swap_free_independent(g)
    y, z = [], []
    for v in range(g.n):
        if x >> v & 1:
            continue
        (y if (g.adj[v] & x).bit_count() == 1 else z).append(v)
    blocks, kinds = [], []
    for blk, kind in ((list(bits(x)), "independent"), (y, "clique"), (z, "clique")):
        if blk:
            blocks.append(blk)
            kinds.append(kind)
    return blocks, kinds


def cochromatic_2k2_c4(g: Graph) -> LabelledPartition:
    """At most three blocks: an independent set ``X``, the vertices with exactly one
    neighbour in ``X`` and those with two or more (both cliques).

    ``X`` must be maximal and admit no swap of one member for two non-adjacent
    outsiders; mere maximality is not enough (a dominating vertex alone is a
    maximal independent set of a ``(2K2, C4)``-free graph whose other vertices
    need not form a clique).
    """
    _require_free(g, [TWO_K2, C4])
    blocks, kinds = _merge_homogeneous(g, *_split_2k2_c4(g))
    return _partition(g, blocks, kinds, {"algorithm": "cochromatic-2k2-c4", "bound": 3})


def _cochromatic_matching(g: Graph, n: int, m: int) -> tuple[list[list[int]], list[str]]:
    if g.n == 0:
        return [], []
    if n <= 1:
        return [list(range(g.n))], ["independent"]
    if m <= 1:
        return [list(range(g.n))], ["clique"]
    c4 = find_induced(g, C4)
    if c4 is None:
        if find_induced(g, TWO_K2) is None:
            return _split_2k2_c4(g)
        blocks, kinds = _cochromatic_matching(complement(g), m, n)
        return blocks, [_flip(k) for k in kinds]
    # pattern co-2K2 on vertices 0-1, 2-3: cycle order 0, 2, 1, 3
    p = c4.mapping
    v1, v2, v3, v4 = p[0], p[2], p[1], p[3]
    adj = g.adj
    rules = [
        (lambda v: adj[v] >> v1 & 1 and adj[v] >> v3 & 1, (n, m - 1)),
        (lambda v: adj[v] >> v2 & 1 and adj[v] >> v4 & 1, (n, m - 1)),
        (lambda v: not adj[v] >> v1 & 1 and not adj[v] >> v2 & 1, (n - 1, m)),
        (lambda v: not adj[v] >> v2 & 1 and not adj[v] >> v3 & 1, (n - 1, m)),
        (lambda v: not adj[v] >> v3 & 1 and not adj[v] >> v4 & 1, (n - 1, m)),
        (lambda v: not adj[v] >> v4 & 1 and not adj[v] >> v1 & 1, (n - 1, m)),
    ]
    bags: list[list[int]] = [[] for _ in rules]
    for v in range(g.n):
        for idx, (rule, _) in enumerate(rules):
            if rule(v):
                bags[idx].append(v)
                break
        else:
            raise ContractError(f"vertex {v} fits none of the six bags")
    blocks, kinds = [], []
    for bag, (_, (nn, mm)) in zip(bags, rules):
        if not bag:
            continue
        sub_blocks, sub_kinds = _cochromatic_matching(g.induced(bag), nn, mm)
        blocks += [[bag[v] for v in blk] for blk in sub_blocks]
        kinds += sub_kinds
    return blocks, kinds


def cochromatic_matching(g: Graph, n: int, m: int) -> LabelledPartition:
    """Cliques and independent sets, at most ``3 * 6^((n-2)+(m-2))`` of them."""
    if n < 2 or m < 2:
        raise ArgumentError("cochromatic_matching needs n, m >= 2")
    _require_free(g, [PatternSpec("nK2", n), PatternSpec("co_nK2", m)])
    blocks, kinds = _merge_homogeneous(g, *_cochromatic_matching(g, n, m))
    bound = bounds.cochromatic_bound(n, m)
    if len(blocks) > bound:
        raise ContractError(f"{len(blocks)} blocks exceed the bound {bound}")
    return _partition(g, blocks, kinds, {"algorithm": "cochromatic-matching", "n": n, "m": m, "bound": bound})


def matching_partition(g: Graph, n: int) -> LabelledPartition:
    """Cliques/independent sets with a ``2K2``-free bipartite graph between any two blocks."""
    if n < 2:
        raise ArgumentError("matching_partition needs n >= 2")
    _require_free(g, family_F(n, 1))
    blocks, kinds = _merge_homogeneous(g, *_cochromatic_matching(g, n, n))

    def solve(top_ids, bottom_ids, i, j):
        sub = g.bipartite_between(top_ids, bottom_ids)
        return lift(_matching_partition(sub, n, n), top_ids, bottom_ids)

    refined, owner, _tags = refine_general(blocks, solve)
    # pieces of one clique or independent set are joined or co-joined, hence trivially 2K2-free
    tags = {(x, y): (matching(2),) for x in range(len(refined)) for y in range(x + 1, len(refined))}
    bound = bounds.matching_partition_bound(n)
    if len(refined) > bound:
        raise ContractError(f"{len(refined)} blocks exceed the bound {bound}")
    out = _partition(g, refined, [kinds[o] for o in owner], {"algorithm": "matching-partition", "n": n, "bound": str(bound)})
    out.guarantees = general_partition(g, refined, [kinds[o] for o in owner], tags).guarantees
    return out


# ---------------------------------------------------------------------------
# Exact cochromatic number
# ---------------------------------------------------------------------------


def _greedy_cochromatic(g: Graph, alive: int) -> list[tuple[int, str]]:
    out = []
    while alive:
        best = None
        for kind in ("clique", "independent"):
            for start in bits(alive):
                blk, cand = 0, alive
                v = start
                while True:
                    blk |= 1 << v
                    cand &= ~(1 << v)
                    cand &= g.adj[v] if kind == "clique" else ~g.adj[v]
                    if not cand:
                        break
                    v = max(bits(cand), key=lambda u: ((g.adj[u] & cand).bit_count() if kind == "clique" else -(g.adj[u] & cand).bit_count(), -u))
                if best is None or blk.bit_count() > best[0].bit_count():
                    best = (blk, kind)
        out.append(best)
        alive &= ~best[0]
    return out


def min_cochromatic(g: Graph) -> list[tuple[int, str]]:
    """Minimum partition into cliques and independent sets (exact branch and bound).

    Vertices are placed in decreasing degree order into an existing compatible
    block or a new one; a one-vertex block fixes its kind on the second vertex.
    """
    if g.n == 0:
        return []
    greedy = _greedy_cochromatic(g, g.full_mask)
    best = [len(greedy), greedy]
    order = sorted(range(g.n), key=lambda v: (-g.degree(v), v))
    state: list[list] = []  # [mask, kind or None]

    def rec(idx: int) -> None:
        if idx == len(order):
            best[0] = len(state)
            best[1] = [(m, kind or "clique") for m, kind in state]
            return
        v = order[idx]
        row = g.adj[v]
        for blk in state:
            mask, kind = blk
            if kind is None:
                new_kind = "clique" if row & mask else "independent"
            elif kind == "clique" and row & mask == mask:
                new_kind = kind
            elif kind == "independent" and not row & mask:
                new_kind = kind
            else:
                continue
            blk[0], blk[1] = mask | 1 << v, new_kind
            rec(idx + 1)
            blk[0], blk[1] = mask, kind
        if len(state) + 1 < best[0]:
            state.append([1 << v, None])
            rec(idx + 1)
            state.pop()

    rec(0)
    return best[1]


def cochromatic_star(g: Graph, n: int, k: int, l: int, exact_limit: int = 16, max_vertices: int = 64) -> LabelledPartition:
    """Clique/independent-set partition of a graph without ``nK_{1,k}``, its complement,
    ``nK_l`` and its complement; exact minimum up to ``exact_limit`` vertices, greedy above."""
    if min(n, k, l) < 1:
        raise ArgumentError("n, k, l must be positive")
    if g.n > max_vertices:
        raise SizeLimitError(f"{g.n} vertices exceed the limit of {max_vertices}")
    _require_free(g, [PatternSpec("G1", n, k), PatternSpec("H1", n, k), PatternSpec("nKl", n, l), PatternSpec("co_nKl", n, l)])
    exact = g.n <= exact_limit
    found = min_cochromatic(g) if exact else _greedy_cochromatic(g, g.full_mask)
    blocks = [sorted(bits(m)) for m, _ in found]
    kinds = [_kind(g, blk) for blk in blocks]
    return _partition(g, blocks, kinds, {"algorithm": "cochromatic-star", "exact": exact})
