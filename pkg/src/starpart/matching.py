"""Chain templates and partitions of bipartite graphs without a matching and a co-matching.

A chain template orders the bags ``A_1..A_z`` and ``B_1..B_z`` so that
``A_i`` is joined to every ``B_j`` with ``j > i+1`` and co-joined to every
``B_j`` with ``j < i``; all nontrivial structure sits between ``A_i`` and
``B_i`` or ``B_{i+1}``.  For ``(nK2, co-mK2)``-free graphs each bag is split
into ``q = (n-1)(m-1)`` pieces, after which the pieces collapse into ``2q``
blocks per side with strictly smaller forbidden parameters between them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Literal

from . import bounds
from .errors import ArgumentError, ClassMembershipError, ContractError
from .graph import BipartiteGraph, LabelledPartition, VertexSet, bits, relation, to_mask
from .patterns import PatternSpec, detect_bipartite
from .refine import PairResult, bipartite_partition, check_tags, lift, refine_bipartite, single_block


def matching(n: int) -> PatternSpec:
    return PatternSpec("bip_matching", n)


def comatching(m: int) -> PatternSpec:
    return PatternSpec("bip_comatching", m)


def require_free(b: BipartiteGraph, specs) -> None:
    """Raise :class:`ClassMembershipError` with a witness if ``b`` contains any of ``specs``."""
    for spec in specs:
        emb = detect_bipartite(b, spec)
        if emb is not None:
            raise ClassMembershipError(spec.name, emb.to_json())


# ---------------------------------------------------------------------------
# Chain templates
# ---------------------------------------------------------------------------


@dataclass
class ChainTemplate:
    bags_a: list[list[int]]
    bags_b: list[list[int]]
    pieces_a: list[list[list[int]]] | None = None
    pieces_b: list[list[list[int]]] | None = None
    params: tuple[int, int, int] | None = None  # (n, m, q)
    host: BipartiteGraph | None = field(default=None, repr=False, compare=False)

    @property
    def z(self) -> int:
        return len(self.bags_a)

    @property
    def refined(self) -> bool:
        return self.params is not None and self.pieces_a is not None

    def to_json(self) -> dict:
        out = {"bags_a": self.bags_a, "bags_b": self.bags_b, "q": self.params[2] if self.params else 1}
        if self.params:
            n, m, q = self.params
            out["params"] = {"n": n, "m": m, "q": q}
            out["pieces_a"] = self.pieces_a
            out["pieces_b"] = self.pieces_b
        else:
            out["params"] = {}
        return out


def _chain_run(rows, cols, alive_a: int, alive_b: int):
    """One run of the chain procedure inside the vertex masks ``alive_a``/``alive_b``.

    Returns the bags built before the procedure stops.
    """
    b1 = min(bits(alive_b), key=lambda v: ((cols[v] & alive_a).bit_count(), v))
    bags_b = [1 << b1]
    bags_a = [cols[b1] & alive_a]
    used_a, used_b = bags_a[0], bags_b[0]
    while True:
        last = bags_a[-1]
        nxt_b = 0
        for v in bits(alive_b & ~used_b):
            if cols[v] & last != last:  # v has a non-neighbour in the last A bag
                nxt_b |= 1 << v
        if not nxt_b:
            return bags_a, bags_b
        nxt_a = 0
        for v in bits(nxt_b):
            nxt_a |= cols[v]
        nxt_a &= alive_a & ~used_a
        bags_a.append(nxt_a)
        bags_b.append(nxt_b)
        used_a |= nxt_a
        used_b |= nxt_b


def _decompose_masks(b: BipartiteGraph) -> list[tuple[list[int], list[int]]]:
    """Consecutive runs of the chain procedure, as (A-bag masks, B-bag masks)."""
    alive_a, alive_b = b.full_a, b.full_b
    runs = []
    while alive_b:
        bags_a, bags_b = _chain_run(b.rows, b.cols, alive_a, alive_b)
        runs.append((bags_a, bags_b))
        for m in bags_a:
            alive_a &= ~m
        for m in bags_b:
            alive_b &= ~m
    if alive_a:
        runs.append(([alive_a], [0]))
    return runs


def skew_join_decompose(b: BipartiteGraph) -> list[tuple[list[int], list[int], BipartiteGraph]]:
    """Split ``b`` as ``G_1 ⊘ G_2 ⊘ ... ⊘ G_p``.

    Each entry is ``(top_ids, bottom_ids, induced piece)``; earlier tops are
    joined to later bottoms and later tops are co-joined to earlier bottoms.
    """
    out = []
    for bags_a, bags_b in _decompose_masks(b):
        a_ids = sorted(v for m in bags_a for v in bits(m))
        b_ids = sorted(v for m in bags_b for v in bits(m))
        out.append((a_ids, b_ids, b.induced(a_ids, b_ids)))
    return out


def skew_join(pieces: list[tuple[list[int], list[int]]], edges_of, a_size: int, b_size: int) -> BipartiteGraph:
    """Rebuild a graph from skew-join pieces: ``edges_of(k)`` yields host-id edges inside piece ``k``."""
    edges = set()
    for k, (a_ids, _b_ids) in enumerate(pieces):
        edges.update(edges_of(k))
        for _a2, b2 in pieces[k + 1:]:
            edges.update((a, bb) for a in a_ids for bb in b2)
    return BipartiteGraph.from_edges(a_size, b_size, edges)


def build_chain_template(b: BipartiteGraph) -> ChainTemplate:
    """Chain template obtained by concatenating the runs of the chain procedure."""
    bags_a, bags_b = [], []
    for run_a, run_b in _decompose_masks(b):
        bags_a += [sorted(bits(m)) for m in run_a]
        bags_b += [sorted(bits(m)) for m in run_b]
    return ChainTemplate(bags_a, bags_b, host=b)


def chain_violations(b: BipartiteGraph, t: ChainTemplate) -> list[str]:
    """Conditions (*) and (**) plus exact coverage, checked with :func:`relation`."""
    problems = []
    if sorted(v for bag in t.bags_a for v in bag) != list(range(b.a_size)):
        problems.append("A bags do not partition A")
    if sorted(v for bag in t.bags_b for v in bag) != list(range(b.b_size)):
        problems.append("B bags do not partition B")
    for i, ai in enumerate(t.bags_a):
        if not ai:
            continue
        va = VertexSet.of("top", ai)
        for j, bj in enumerate(t.bags_b):
            if not bj:
                continue
            vb = VertexSet.of("bottom", bj)
            if j > i + 1 and not relation(b, va, vb, "joined"):
                problems.append(f"A_{i + 1} not joined to B_{j + 1}")
            if j < i and not relation(b, va, vb, "cojoined"):
                problems.append(f"A_{i + 1} not co-joined to B_{j + 1}")
    return problems


# ---------------------------------------------------------------------------
# (n, m, q) refinement
# ---------------------------------------------------------------------------


def cover_set(b: BipartiteGraph, side: Literal["top", "bottom"] = "top", mode: Literal["cover", "cocover"] = "cover") -> VertexSet:
    """Minimal ``S`` of ``side`` with ``N(S) = N(side)`` (or the same for non-neighbourhoods).

    Vertices are tried for removal once each, in increasing id; a vertex that
    cannot be removed stays irremovable as ``S`` shrinks, so one pass suffices.
    """
    if side not in ("top", "bottom") or mode not in ("cover", "cocover"):
        raise ArgumentError(f"bad cover_set arguments side={side!r} mode={mode!r}")
    rows = b.rows if side == "top" else b.cols
    other_full = b.full_b if side == "top" else b.full_a
    if mode == "cocover":
        rows = tuple(other_full & ~r for r in rows)
    s = list(range(len(rows)))
    for v in range(len(rows)):
        rest = 0
        for u in s:
            if u != v:
                rest |= rows[u]
        if rows[v] & ~rest == 0:
            s.remove(v)
    return VertexSet.of(side, s)


def _split_by(targets: int, witnesses: list[int], row_of) -> list[int]:
    """``T ∩ R(w_1)``, ``T ∩ R(w_2) \\ R(w_1)``, ...; empty pieces dropped."""
    pieces, seen = [], 0
    for w in witnesses:
        piece = targets & row_of(w) & ~seen
        seen |= row_of(w)
        if piece:
            pieces.append(piece)
    if targets & ~seen:
        raise ContractError("witness set does not cover its target bag")
    return pieces


def refine_to_nm_template(b: BipartiteGraph, n: int, m: int) -> ChainTemplate:
    """Split each bag of the chain template into ``q = (n-1)(m-1)`` pieces.

    Guarantees per consecutive pair of pieces:
    ``G[A_ig, B_(i+1)h]`` is co-``(m-1)K2``-free and ``G[A_ig, B_ih]`` is
    ``(n-1)K2``-free (both inside the ``(nK2, co-mK2)``-free host).
    """
    if n < 2 or m < 2:
        raise ArgumentError("refinement needs n, m >= 2")
    require_free(b, [matching(n), comatching(m)])
    q = (n - 1) * (m - 1)
    rows, cols = b.rows, b.cols
    pieces_a: list[list[int]] = []
    pieces_b: list[list[int]] = []
    bags_a, bags_b = [], []
    for run_a, run_b in _decompose_masks(b):
        for idx, (a_bag, b_bag) in enumerate(zip(run_a, run_b)):
            bags_a.append(a_bag)
            bags_b.append(b_bag)
            if idx == 0:
                pieces_a.append([a_bag] if a_bag else [])
                pieces_b.append([b_bag] if b_bag else [])
                continue
            # A_i split by a minimal set of B_i vertices covering it
            sub = b.induced(list(bits(a_bag)), list(bits(b_bag)))
            b_ids = list(bits(b_bag))
            cov = [b_ids[v] for v in cover_set(sub, "bottom", "cover")]
            pa = _split_by(a_bag, cov, lambda w: cols[w])
            # B_i split by a minimal set of A_{i-1} vertices co-covering it
            prev = run_a[idx - 1]
            sub = b.induced(list(bits(prev)), list(bits(b_bag)))
            a_ids = list(bits(prev))
            cocov = [a_ids[v] for v in cover_set(sub, "top", "cocover")]
            pb = _split_by(b_bag, cocov, lambda w: b.full_b & ~rows[w])
            if idx == 1:
                # B_2 also split by A_2 vertices covering it (min-degree choice of b_1)
                sub = b.induced(list(bits(a_bag)), list(bits(b_bag)))
                a2 = list(bits(a_bag))
                cov2 = [a2[v] for v in cover_set(sub, "top", "cover")]
                py = _split_by(b_bag, cov2, lambda w: rows[w])
                pb = [x & y for x in pb for y in py if x & y]
            pieces_a.append(pa)
            pieces_b.append(pb)
    for pieces in pieces_a + pieces_b:
        if len(pieces) > q:
            raise ContractError(f"bag split into {len(pieces)} > q = {q} pieces")
        pieces.extend([0] * (q - len(pieces)))
    return ChainTemplate(
        [sorted(bits(x)) for x in bags_a],
        [sorted(bits(x)) for x in bags_b],
        [[sorted(bits(x)) for x in ps] for ps in pieces_a],
        [[sorted(bits(x)) for x in ps] for ps in pieces_b],
        (n, m, q),
        host=b,
    )


def refinement_violations(b: BipartiteGraph, t: ChainTemplate) -> list[str]:
    """Check the consecutive-pair guarantees of a refined template with the detector."""
    n, m, _q = t.params
    problems = []
    for i in range(t.z):
        for g, ag in enumerate(t.pieces_a[i]):
            for j, spec in ((i, matching(n - 1)), (i + 1, comatching(m - 1))):
                if j >= t.z or not ag:
                    continue
                for h, bh in enumerate(t.pieces_b[j]):
                    if bh and detect_bipartite(b.induced(ag, bh), spec) is not None:
                        problems.append(f"G[A_{i + 1},{g + 1}, B_{j + 1},{h + 1}] contains {spec.name}")
    return problems


def collapse_template(t: ChainTemplate) -> PairResult:
    """Odd/even unions of same-index pieces: ``2q`` blocks per side, tags re-verified.

    Same parity pairs only meet between ``A_i`` and ``B_i`` and are
    ``((n-1)K2, co-mK2)``-free; mixed parity pairs only meet between
    ``A_i`` and ``B_(i+1)`` and are ``(nK2, co-(m-1)K2)``-free.
    """
    if not t.refined:
        raise ArgumentError("collapse_template needs a refined chain template")
    n, m, q = t.params
    tops = [[] for _ in range(2 * q)]
    bottoms = [[] for _ in range(2 * q)]
    for i in range(t.z):
        parity = i % 2  # bag index i+1: odd -> 0
        for g in range(q):
            tops[parity * q + g] += t.pieces_a[i][g]
            bottoms[parity * q + g] += t.pieces_b[i][g]
    same = (matching(n - 1), comatching(m))
    mixed = (matching(n), comatching(m - 1))
    tags = {}
    for x in range(2 * q):
        for y in range(2 * q):
            tags[(x, y)] = same if (x // q) == (y // q) else mixed
    res = PairResult([sorted(b) for b in tops], [sorted(b) for b in bottoms], tags)
    if t.host is not None:
        check_tags(t.host, res, "collapse: ")
    return res


# ---------------------------------------------------------------------------
# Recursive partition
# ---------------------------------------------------------------------------


def _matching_partition(b: BipartiteGraph, n: int, m: int) -> PairResult:
    all_a, all_b = list(range(b.a_size)), list(range(b.b_size))
    if n <= 2 or m <= 2:
        return single_block(all_a, all_b, [matching(2)])
    collapsed = collapse_template(refine_to_nm_template(b, n, m)).drop_empty()

    def solve(top_ids, bottom_ids, i, j):
        less_n, less_m = collapsed.tags[(i, j)]
        sub = b.induced(top_ids, bottom_ids)
        return lift(_matching_partition(sub, less_n.n, less_m.n), top_ids, bottom_ids)

    return refine_bipartite(collapsed.tops, collapsed.bottoms, solve)


def bipartite_matching_partition(b: BipartiteGraph, n: int, m: int) -> LabelledPartition:
    """Blocks on both sides with every cross pair ``2K2``-free, at most ``f(n, m)`` per side."""
    if n < 1 or m < 1:
        raise ArgumentError("n and m must be positive")
    require_free(b, [matching(n), comatching(m)])
    res = _matching_partition(b, n, m).drop_empty()
    res.tags = {key: (matching(2),) for key in product(range(len(res.tops)), range(len(res.bottoms)))}
    check_tags(b, res, "bipartite_matching_partition: ")
    bound = bounds.f_bipartite(n, m)
    if max(len(res.tops), len(res.bottoms)) > bound:
        raise ContractError(f"block count exceeds f({n},{m}) = {bound}")
    return bipartite_partition(res, {"algorithm": "bipartite-matching", "n": n, "m": m, "bound": str(bound)})
