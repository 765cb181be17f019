"""Pairwise partition bookkeeping shared by the recursive partitioners.

Every construction in the package has the same outer shape: split both sides
into bags, solve each bag pair separately, then intersect the sub-partitions
each bag received from all of its pairs.  :class:`PairResult` carries a
bipartite partition in host vertex ids together with, per block pair, the
patterns the pair is guaranteed to avoid.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

from .errors import ContractError
from .graph import BipartiteGraph, Block, Graph, Guarantee, LabelledPartition
from .patterns import PatternSpec, detect_bipartite

Tags = dict[tuple[int, int], tuple[PatternSpec, ...]]


@dataclass
class PairResult:
    """Top blocks, bottom blocks (host ids) and the declared pair guarantees."""

    tops: list[list[int]]
    bottoms: list[list[int]]
    tags: Tags = field(default_factory=dict)

    def drop_empty(self) -> "PairResult":
        keep_t = [i for i, blk in enumerate(self.tops) if blk]
        keep_b = [j for j, blk in enumerate(self.bottoms) if blk]
        tags = {}
        for ni, i in enumerate(keep_t):
            for nj, j in enumerate(keep_b):
                if (i, j) in self.tags:
                    tags[(ni, nj)] = self.tags[(i, j)]
        return PairResult([self.tops[i] for i in keep_t], [self.bottoms[j] for j in keep_b], tags)


def single_block(top_ids: Sequence[int], bottom_ids: Sequence[int], tag: Sequence[PatternSpec]) -> PairResult:
    return PairResult([list(top_ids)], [list(bottom_ids)], {(0, 0): tuple(tag)})


def lift(local: PairResult, top_ids: Sequence[int], bottom_ids: Sequence[int]) -> PairResult:
    """Translate a result computed on ``host.induced(top_ids, bottom_ids)`` back to host ids."""
    return PairResult(
        [[top_ids[v] for v in blk] for blk in local.tops],
        [[bottom_ids[v] for v in blk] for blk in local.bottoms],
        dict(local.tags),
    )


def _common_refinement(part: Sequence[int], labels: list[dict[int, int]]) -> tuple[list[list[int]], list[tuple[int, ...]]]:
    groups: dict[tuple[int, ...], list[int]] = {}
    for v in sorted(part):
        key = tuple(lab[v] for lab in labels)
        groups.setdefault(key, []).append(v)
    keys = sorted(groups, key=lambda key: groups[key][0])
    return [groups[key] for key in keys], keys


def _labels(blocks: list[list[int]]) -> dict[int, int]:
    return {v: idx for idx, blk in enumerate(blocks) for v in blk}


def refine_bipartite(
    tops: Sequence[Sequence[int]],
    bottoms: Sequence[Sequence[int]],
    solve: Callable[[Sequence[int], Sequence[int], int, int], PairResult],
) -> PairResult:
    """Solve every (top bag, bottom bag) pair and intersect the sub-partitions.

    ``solve(top_ids, bottom_ids, i, j)`` returns a :class:`PairResult` in host
    ids covering exactly those vertices.  Empty bags are skipped.
    """
    tops = [list(t) for t in tops if t]
    bottoms = [list(b) for b in bottoms if b]
    results = {(i, j): solve(tops[i], bottoms[j], i, j) for i in range(len(tops)) for j in range(len(bottoms))}
    top_lab = {key: _labels(res.tops) for key, res in results.items()}
    bot_lab = {key: _labels(res.bottoms) for key, res in results.items()}

    new_tops, top_keys, top_owner = [], [], []
    for i, part in enumerate(tops):
        blocks, keys = _common_refinement(part, [top_lab[(i, j)] for j in range(len(bottoms))])
        new_tops += blocks
        top_keys += keys
        top_owner += [i] * len(blocks)
    new_bottoms, bottom_keys, bottom_owner = [], [], []
    for j, part in enumerate(bottoms):
        blocks, keys = _common_refinement(part, [bot_lab[(i, j)] for i in range(len(tops))])
        new_bottoms += blocks
        bottom_keys += keys
        bottom_owner += [j] * len(blocks)

    tags: Tags = {}
    for x, (i, kx) in enumerate(zip(top_owner, top_keys)):
        for y, (j, ky) in enumerate(zip(bottom_owner, bottom_keys)):
            tag = results[(i, j)].tags.get((kx[j], ky[i]))
            if tag:
                tags[(x, y)] = tag
    return PairResult(new_tops, new_bottoms, tags)


def refine_general(
    blocks: Sequence[Sequence[int]],
    solve: Callable[[Sequence[int], Sequence[int], int, int], PairResult],
) -> tuple[list[list[int]], list[int], Tags]:
    """General-graph analogue: every unordered pair ``i < j`` is solved with ``i`` on top.

    Returns the refined blocks, the index of the original block owning each,
    and tags keyed by refined ``(x, y)`` with ``x < y``.
    """
    blocks = [list(b) for b in blocks]
    t = len(blocks)
    results = {(i, j): solve(blocks[i], blocks[j], i, j) for i in range(t) for j in range(i + 1, t)}
    labels: list[list[dict[int, int]]] = [[] for _ in range(t)]
    for (i, j), res in sorted(results.items()):
        labels[i].append(_labels(res.tops))
        labels[j].append(_labels(res.bottoms))
    # position of pair (i,j) inside labels[i] / labels[j]
    slot: dict[tuple[int, int], int] = {}
    counters = [0] * t
    for (i, j) in sorted(results):
        slot[(i, j, "top")] = counters[i]
        counters[i] += 1
        slot[(i, j, "bottom")] = counters[j]
        counters[j] += 1

    new_blocks, keys, owner = [], [], []
    for i, part in enumerate(blocks):
        if not part:
            continue
        sub, sub_keys = _common_refinement(part, labels[i])
        new_blocks += sub
        keys += sub_keys
        owner += [i] * len(sub)

    tags: Tags = {}
    for x in range(len(new_blocks)):
        for y in range(x + 1, len(new_blocks)):
            i, j = owner[x], owner[y]
            if i == j:
                continue
            if i > j:
                raise AssertionError("refined blocks must stay ordered by owner")
            res = results[(i, j)]
            tag = res.tags.get((keys[x][slot[(i, j, "top")]], keys[y][slot[(i, j, "bottom")]]))
            if tag:
                tags[(x, y)] = tag
    return new_blocks, owner, tags


def check_tags(host: BipartiteGraph, res: PairResult, context: str = "") -> None:
    """Re-verify every declared guarantee with the detector; raise on the first failure."""
    for (i, j), specs in res.tags.items():
        sub = host.induced(res.tops[i], res.bottoms[j])
        for spec in specs:
            emb = detect_bipartite(sub, spec)
            if emb is not None:
                top = [res.tops[i][v] for v in emb.top]
                bottom = [res.bottoms[j][v] for v in emb.bottom]
                raise ContractError(
                    f"{context}guarantee {spec.name} fails between top block {i} and bottom block {j}: "
                    f"top {top}, bottom {bottom}"
                )


def bipartite_partition(res: PairResult, meta: dict | None = None) -> LabelledPartition:
    blocks = [Block("unconstrained", tuple(sorted(t)), "top") for t in res.tops]
    blocks += [Block("unconstrained", tuple(sorted(b)), "bottom") for b in res.bottoms]
    off = len(res.tops)
    guarantees = [
        Guarantee(i, off + j, "+".join(spec.name for spec in specs))
        for (i, j), specs in sorted(res.tags.items())
    ]
    return LabelledPartition(blocks, guarantees, dict(meta or {}))


def pair_result_of(p: LabelledPartition, parse) -> PairResult:
    """Inverse of :func:`bipartite_partition` (``parse`` turns a tag string into specs)."""
    tops = [list(b.vertices) for b in p.blocks if b.side == "top"]
    bottoms = [list(b.vertices) for b in p.blocks if b.side == "bottom"]
    top_idx = {i: x for x, i in enumerate(p.side_blocks("top"))}
    bot_idx = {j: y for y, j in enumerate(p.side_blocks("bottom"))}
    tags = {}
    for gt in p.guarantees:
        if gt.i in top_idx and gt.j in bot_idx:
            tags[(top_idx[gt.i], bot_idx[gt.j])] = tuple(parse(gt.free))
    return PairResult(tops, bottoms, tags)


def general_partition(g: Graph, blocks: list[list[int]], kinds: list[str], tags: Tags, meta: dict | None = None) -> LabelledPartition:
    out = [Block(kind, tuple(sorted(b))) for kind, b in zip(kinds, blocks)]
    guarantees = [
        Guarantee(x, y, "+".join(spec.name for spec in specs)) for (x, y), specs in sorted(tags.items())
    ]
    return LabelledPartition(out, guarantees, dict(meta or {}))
