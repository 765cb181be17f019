"""Graph and bipartite-graph representations, serialization and set relations.

Adjacency is stored as Python ``int`` bitmasks: bit ``j`` of ``adj[i]`` is set
when ``i`` and ``j`` are adjacent.  Python integers are unbounded, so graphs of
any size use the same code path; the desk-scale limits live in the callers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Literal, Sequence

from .errors import ArgumentError, GraphParseError

Side = Literal["top", "bottom", "general"]
BlockKind = Literal["clique", "independent", "unconstrained"]


def bits(mask: int) -> Iterator[int]:
    """Yield the indices of the set bits of ``mask`` in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def to_mask(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def popcount(mask: int) -> int:
    return mask.bit_count()


# ---------------------------------------------------------------------------
# General graphs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on vertices ``0..n-1``."""

    n: int
    adj: tuple[int, ...]

    def __post_init__(self):
        if len(self.adj) != self.n:
            raise ArgumentError(f"adjacency has {len(self.adj)} rows for n={self.n}")
        full = (1 << self.n) - 1
        for v, row in enumerate(self.adj):
            if row & ~full:
                raise ArgumentError(f"row {v} references a vertex >= n")
            if row >> v & 1:
                raise ArgumentError(f"self-loop at vertex {v}")
            for u in bits(row):
                if not self.adj[u] >> v & 1:
                    raise ArgumentError(f"adjacency not symmetric at ({v}, {u})")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        rows = [0] * n
        for u, v in edges:
            if u == v:
                raise ArgumentError(f"self-loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ArgumentError(f"edge ({u}, {v}) out of range for n={n}")
            rows[u] |= 1 << v
            rows[v] |= 1 << u
        return cls(n, tuple(rows))

    @classmethod
    def empty(cls, n: int) -> "Graph":
        return cls(n, (0,) * n)

    @classmethod
    def complete(cls, n: int) -> "Graph":
        full = (1 << n) - 1
        return cls(n, tuple(full ^ (1 << v) for v in range(n)))

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.adj[u] >> v & 1)

    def neighbours(self, v: int) -> int:
        return self.adj[v]

    def degree(self, v: int) -> int:
        return self.adj[v].bit_count()

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in bits(self.adj[u] >> (u + 1) << (u + 1))]

    def edge_count(self) -> int:
        return sum(r.bit_count() for r in self.adj) // 2

    def induced(self, vertices: Sequence[int]) -> "Graph":
        """Subgraph induced by ``vertices``; vertex ``i`` of the result is ``vertices[i]``."""
        index = {v: i for i, v in enumerate(vertices)}
        rows = []
        for v in vertices:
            rows.append(to_mask(index[u] for u in bits(self.adj[v]) if u in index))
        return Graph(len(vertices), tuple(rows))

    def complement(self) -> "Graph":
        return complement(self)

    def is_clique(self, mask: int) -> bool:
        return all((self.adj[v] | (1 << v)) & mask == mask for v in bits(mask))

    def is_independent(self, mask: int) -> bool:
        return all(self.adj[v] & mask == 0 for v in bits(mask))

    def bipartite_between(self, top: Sequence[int], bottom: Sequence[int]) -> "BipartiteGraph":
        """Bipartite graph ``G[top, bottom]`` with sides in the given order."""
        index = {v: j for j, v in enumerate(bottom)}
        rows = tuple(to_mask(index[u] for u in bits(self.adj[v]) if u in index) for v in top)
        return BipartiteGraph(len(top), len(bottom), rows)


def complement(g: Graph) -> Graph:
    """Edge ``uv`` is present iff it is absent in ``g`` (``u != v``)."""
    full = g.full_mask
    return Graph(g.n, tuple(full ^ row ^ (1 << v) for v, row in enumerate(g.adj)))


# ---------------------------------------------------------------------------
# Bipartite graphs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BipartiteGraph:
    """Bipartite graph with top side ``A`` and bottom side ``B``.

    ``rows[a]`` is the neighbourhood of top vertex ``a`` as a mask over ``B``.
    """

    a_size: int
    b_size: int
    rows: tuple[int, ...]

    def __post_init__(self):
        if len(self.rows) != self.a_size:
            raise ArgumentError(f"{len(self.rows)} rows for |A|={self.a_size}")
        full = (1 << self.b_size) - 1
        for a, row in enumerate(self.rows):
            if row & ~full:
                raise ArgumentError(f"top vertex {a} has a neighbour outside B")

    @classmethod
    def from_edges(cls, a_size: int, b_size: int, edges: Iterable[tuple[int, int]]) -> "BipartiteGraph":
        rows = [0] * a_size
        for a, b in edges:
            if not (0 <= a < a_size and 0 <= b < b_size):
                raise ArgumentError(f"edge ({a}, {b}) out of range for sides {a_size}x{b_size}")
            rows[a] |= 1 << b
        return cls(a_size, b_size, tuple(rows))

    @classmethod
    def complete(cls, a_size: int, b_size: int) -> "BipartiteGraph":
        return cls(a_size, b_size, ((1 << b_size) - 1,) * a_size)

    @classmethod
    def empty(cls, a_size: int, b_size: int) -> "BipartiteGraph":
        return cls(a_size, b_size, (0,) * a_size)

    @cached_property
    def cols(self) -> tuple[int, ...]:
        """Neighbourhood of each bottom vertex as a mask over ``A``."""
        cols = [0] * self.b_size
        for a, row in enumerate(self.rows):
            for b in bits(row):
                cols[b] |= 1 << a
        return tuple(cols)

    @property
    def full_a(self) -> int:
        return (1 << self.a_size) - 1

    @property
    def full_b(self) -> int:
        return (1 << self.b_size) - 1

    @property
    def order(self) -> int:
        return self.a_size + self.b_size

    def has_edge(self, a: int, b: int) -> bool:
        return bool(self.rows[a] >> b & 1)

    def edges(self) -> list[tuple[int, int]]:
        return [(a, b) for a, row in enumerate(self.rows) for b in bits(row)]

    def edge_count(self) -> int:
        return sum(r.bit_count() for r in self.rows)

    def induced(self, a_ids: Sequence[int], b_ids: Sequence[int]) -> "BipartiteGraph":
        """``G[A', B']`` with top vertex ``i`` = ``a_ids[i]`` and bottom ``j`` = ``b_ids[j]``."""
        index = {b: j for j, b in enumerate(b_ids)}
        rows = tuple(to_mask(index[b] for b in bits(self.rows[a]) if b in index) for a in a_ids)
        return BipartiteGraph(len(a_ids), len(b_ids), rows)

    def swap_sides(self) -> "BipartiteGraph":
        return BipartiteGraph(self.b_size, self.a_size, self.cols)

    def bipartite_complement(self) -> "BipartiteGraph":
        return bipartite_complement(self)

    def to_graph(self) -> Graph:
        """General graph with ``A`` on ``0..|A|-1`` and ``B`` on ``|A|..``."""
        na = self.a_size
        rows = [row << na for row in self.rows] + list(self.cols)
        return Graph(na + self.b_size, tuple(rows))


def bipartite_complement(b: BipartiteGraph) -> BipartiteGraph:
    """Flip every cross pair; sides unchanged."""
    full = b.full_b
    return BipartiteGraph(b.a_size, b.b_size, tuple(full ^ row for row in b.rows))


# ---------------------------------------------------------------------------
# Vertex sets and relations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class VertexSet:
    side: Side
    members: frozenset[int]

    @classmethod
    def of(cls, side: Side, members: Iterable[int]) -> "VertexSet":
        return cls(side, frozenset(members))

    @property
    def mask(self) -> int:
        return to_mask(self.members)

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(sorted(self.members))


RelationKind = Literal["joined", "cojoined", "covers", "cocovers", "r_covered", "r_cocovered"]


def _neighbour_rows(g: Graph | BipartiteGraph, s: VertexSet) -> tuple[tuple[int, ...], int]:
    """Rows for the vertices of ``s`` and the mask of the opposite universe."""
    if isinstance(g, Graph):
        if s.side != "general":
            raise ArgumentError("vertex sets of a general graph must have side 'general'")
        return g.adj, g.full_mask
    if s.side == "top":
        return g.rows, g.full_b
    if s.side == "bottom":
        return g.cols, g.full_a
    raise ArgumentError("vertex sets of a bipartite graph must be 'top' or 'bottom'")


def relation(g: Graph | BipartiteGraph, v1: VertexSet, v2: VertexSet, kind: RelationKind, r: int = 1) -> bool:
    """Decide one of the set relations between ``v1`` and ``v2``.

    ``joined``/``cojoined``: all / none of the cross pairs are edges.
    ``covers``/``cocovers``: every vertex of ``v2`` has a neighbour / non-neighbour in ``v1``.
    ``r_covered``/``r_cocovered``: every vertex of ``v2`` has at least ``r``
    neighbours / non-neighbours in ``v1``.
    """
    if isinstance(g, BipartiteGraph):
        if v1.side == v2.side:
            raise ArgumentError("bipartite relations need one top and one bottom set")
    elif v1.members & v2.members:
        raise ArgumentError("vertex sets overlap")
    if kind == "covers":
        kind, r = "r_covered", 1
    elif kind == "cocovers":
        kind, r = "r_cocovered", 1
    rows1, _ = _neighbour_rows(g, v1)
    rows2, _ = _neighbour_rows(g, v2)
    m1, m2 = v1.mask, v2.mask
    if kind == "joined":
        return all(rows1[v] & m2 == m2 for v in v1.members)
    if kind == "cojoined":
        return all(rows1[v] & m2 == 0 for v in v1.members)
    size1 = len(v1)
    if kind == "r_covered":
        return all((rows2[v] & m1).bit_count() >= r for v in v2.members)
    if kind == "r_cocovered":
        return all(size1 - (rows2[v] & m1).bit_count() >= r for v in v2.members)
    raise ArgumentError(f"unknown relation kind {kind!r}")


# ---------------------------------------------------------------------------
# graph6
# ---------------------------------------------------------------------------

_G6_HEADER = ">>graph6<<"


def _g6_size_prefix(n: int) -> str:
    if n < 63:
        return chr(n + 63)
    if n < 258048:
        return "~" + "".join(chr(((n >> s) & 63) + 63) for s in (12, 6, 0))
    return "~~" + "".join(chr(((n >> s) & 63) + 63) for s in (30, 24, 18, 12, 6, 0))


def write_graph6(g: Graph) -> str:
    """Canonical graph6 string (no header, no newline)."""
    out = [_g6_size_prefix(g.n)]
    acc = nbits = 0
    for j in range(1, g.n):
        row = g.adj[j]
        for i in range(j):
            acc = acc << 1 | (row >> i & 1)
            nbits += 1
            if nbits == 6:
                out.append(chr(acc + 63))
                acc = nbits = 0
    if nbits:
        out.append(chr((acc << (6 - nbits)) + 63))
    return "".join(out)


def parse_graph6(text: str) -> Graph:
    """Decode one graph6 string.  A trailing newline and the optional header are accepted."""
    base = 0
    if text.startswith(_G6_HEADER):
        base = len(_G6_HEADER)
    data = text[base:]
    if data.endswith("\n"):
        data = data[:-1]
        if data.endswith("\r"):
            data = data[:-1]
    if not data:
        raise GraphParseError("empty graph6 string", base)
    for pos, ch in enumerate(data):
        if not 63 <= ord(ch) <= 126:
            raise GraphParseError(f"invalid graph6 character {ch!r}", base + pos)

    def sixbits(start: int, count: int) -> int:
        if start + count > len(data):
            raise GraphParseError("truncated size header", base + len(data))
        val = 0
        for ch in data[start:start + count]:
            val = val << 6 | (ord(ch) - 63)
        return val

    if data[0] != "~":
        n, pos = ord(data[0]) - 63, 1
    elif len(data) > 1 and data[1] == "~":
        n, pos = sixbits(2, 6), 8
    else:
        n, pos = sixbits(1, 3), 4
    nbits = n * (n - 1) // 2
    nchars = (nbits + 5) // 6
    payload = data[pos:]
    if len(payload) < nchars:
        raise GraphParseError(f"truncated payload: expected {nchars} bytes, got {len(payload)}", base + len(data))
    if len(payload) > nchars:
        raise GraphParseError("trailing garbage after payload", base + pos + nchars)
    rows = [0] * n
    k = 0
    for j in range(1, n):
        for i in range(j):
            ch = payload[k // 6]
            if (ord(ch) - 63) >> (5 - k % 6) & 1:
                rows[i] |= 1 << j
                rows[j] |= 1 << i
            k += 1
    if nchars and nbits % 6:
        pad = (ord(payload[-1]) - 63) & ((1 << (6 - nbits % 6)) - 1)
        if pad:
            raise GraphParseError("non-zero padding bits", base + pos + nchars - 1)
    return Graph(n, tuple(rows))


# ---------------------------------------------------------------------------
# Bipartite text format
# ---------------------------------------------------------------------------


def parse_bipartite(text: str) -> BipartiteGraph:
    """Read the ``bip <|A|> <|B|>`` + ``a b`` edge-line format."""
    header = None
    edges: list[tuple[int, int]] = []
    offset = 0
    for line in text.splitlines(keepends=True):
        start = offset
        offset += len(line.encode())
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        parts = body.split()
        if header is None:
            if len(parts) != 3 or parts[0] != "bip":
                raise GraphParseError("expected header 'bip <|A|> <|B|>'", start)
            try:
                header = (int(parts[1]), int(parts[2]))
            except ValueError:
                raise GraphParseError("non-integer side size in header", start) from None
            if header[0] < 0 or header[1] < 0:
                raise GraphParseError("negative side size", start)
            continue
        if len(parts) != 2:
            raise GraphParseError("edge line must be 'a b'", start)
        try:
            a, b = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphParseError("non-integer vertex index", start) from None
        if not (0 <= a < header[0] and 0 <= b < header[1]):
            raise GraphParseError(f"edge ({a}, {b}) outside sides {header[0]}x{header[1]}", start)
        edges.append((a, b))
    if header is None:
        raise GraphParseError("missing 'bip' header", offset)
    return BipartiteGraph.from_edges(header[0], header[1], edges)


def write_bipartite(b: BipartiteGraph) -> str:
    lines = [f"bip {b.a_size} {b.b_size}"]
    lines += [f"{a} {v}" for a, v in b.edges()]
    return "\n".join(lines) + "\n"


def read_any_graph(text: str) -> Graph | BipartiteGraph:
    """Dispatch on content: the bipartite format starts with ``bip``, anything else is graph6."""
    stripped = "\n".join(l for l in text.splitlines() if l.split("#", 1)[0].strip())
    if stripped.lstrip().startswith("bip"):
        return parse_bipartite(text)
    lines = [l for l in text.splitlines() if l.strip()]
    if len(lines) != 1:
        raise GraphParseError("expected exactly one graph6 line", 0)
    return parse_graph6(lines[0].strip())


# ---------------------------------------------------------------------------
# Labelled partitions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Block:
    kind: BlockKind
    vertices: tuple[int, ...]
    side: Side = "general"


@dataclass(frozen=True)
class Guarantee:
    """Block ``i`` (top role) and block ``j`` (bottom role) induce a graph free of ``free``.

    ``free`` is one pattern name or several joined by ``+`` (all must be absent).
    """

    i: int
    j: int
    free: str


@dataclass
class LabelledPartition:
    blocks: list[Block]
    guarantees: list[Guarantee] = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def side_blocks(self, side: Side) -> list[int]:
        return [i for i, blk in enumerate(self.blocks) if blk.side == side]

    def block_count(self, side: Side | None = None) -> int:
        if side is None:
            return len(self.blocks)
        return len(self.side_blocks(side))

    def guarantee_for(self, i: int, j: int) -> Guarantee | None:
        for gt in self.guarantees:
            if (gt.i, gt.j) == (i, j) or (gt.i, gt.j) == (j, i):
                return gt
        return None

    def check_covers(self, g: Graph | BipartiteGraph) -> None:
        """Raise :class:`ArgumentError` unless the blocks partition the vertex set."""
        if isinstance(g, Graph):
            universes = {"general": g.n}
        else:
            universes = {"top": g.a_size, "bottom": g.b_size}
        seen: dict[str, set[int]] = {s: set() for s in universes}
        for idx, blk in enumerate(self.blocks):
            if blk.side not in universes:
                raise ArgumentError(f"block {idx} has side {blk.side!r} not valid for this graph")
            for v in blk.vertices:
                if not 0 <= v < universes[blk.side]:
                    raise ArgumentError(f"block {idx} contains out-of-range vertex {v}")
                if v in seen[blk.side]:
                    raise ArgumentError(f"vertex {v} ({blk.side}) appears in two blocks")
                seen[blk.side].add(v)
        for side, size in universes.items():
            missing = set(range(size)) - seen[side]
            if missing:
                raise ArgumentError(f"vertices {sorted(missing)} ({side}) are in no block")

    def to_json(self) -> dict:
        blocks = []
        for blk in self.blocks:
            entry = {"kind": blk.kind, "vertices": list(blk.vertices)}
            if blk.side != "general":
                entry["side"] = blk.side
            blocks.append(entry)
        out = {
            "blocks": blocks,
            "guarantees": [{"i": gt.i, "j": gt.j, "free": gt.free} for gt in self.guarantees],
        }
        if self.meta:
            out["meta"] = self.meta
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1, sort_keys=False)

    @classmethod
    def from_json(cls, data: dict | str) -> "LabelledPartition":
        if isinstance(data, str):
            try:
                data = json.loads(data)
            except json.JSONDecodeError as exc:
                raise GraphParseError(f"invalid partition JSON: {exc.msg}", exc.pos) from None
        try:
            blocks = [
                Block(b["kind"], tuple(int(v) for v in b["vertices"]), b.get("side", "general"))
                for b in data["blocks"]
            ]
            guarantees = [Guarantee(int(g["i"]), int(g["j"]), str(g["free"])) for g in data.get("guarantees", [])]
        except (KeyError, TypeError, ValueError) as exc:
            raise GraphParseError(f"malformed partition JSON: {exc}") from None
        for blk in blocks:
            if blk.kind not in ("clique", "independent", "unconstrained"):
                raise GraphParseError(f"unknown block kind {blk.kind!r}")
        return cls(blocks, guarantees, dict(data.get("meta", {})))
