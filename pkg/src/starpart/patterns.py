"""Forbidden-pattern graphs and induced-containment tests.

Two search paths exist:

* :func:`find_induced` / :func:`find_induced_bipartite` run a generic bitset
  backtracking search.  Patterns here are unions of identical units (stars,
  edges, cliques), so units are embedded in increasing order of their first
  host vertex and twin vertices inside a unit in increasing host order.
* :func:`find_star_forest` and :func:`is_twin_star_free` are the fast
  specialised tests for bipartite star forests, based on private
  neighbourhoods: ``n`` top vertices centre an induced ``nΛ_k`` iff each of
  them has at least ``k`` neighbours that none of the others sees.

The general search is exponential in the pattern size in the worst case
(induced matching is NP-hard for unbounded ``n``); callers cap ``n*k``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Literal

from .errors import ArgumentError
from .graph import BipartiteGraph, Graph, bipartite_complement, bits, complement

GENERAL_FAMILIES = ("G1", "G2", "G3", "G4", "H1", "H2", "H3", "H4", "nK2", "co_nK2", "nKl", "co_nKl")
BIPARTITE_FAMILIES = ("bip_matching", "bip_comatching", "bip_lambda", "bip_up", "bip_co_lambda", "bip_co_up")

# Complement of each family: general complement for general families,
# bipartite complement for the bipartite ones.
_COMPLEMENT = {
    "G1": "H1", "G2": "H2", "G3": "H3", "G4": "H4",
    "H1": "G1", "H2": "G2", "H3": "G3", "H4": "G4",
    "nK2": "co_nK2", "co_nK2": "nK2", "nKl": "co_nKl", "co_nKl": "nKl",
    "bip_matching": "bip_comatching", "bip_comatching": "bip_matching",
    "bip_lambda": "bip_co_lambda", "bip_co_lambda": "bip_lambda",
    "bip_up": "bip_co_up", "bip_co_up": "bip_up",
}


@dataclass(frozen=True)
class PatternSpec:
    """One member of the forbidden families.

    ``k`` is the star size for the star families and the clique size for
    ``nKl``/``co_nKl``; it is ignored by the matching families.
    """

    family: str
    n: int
    k: int = 1

    def __post_init__(self):
        if self.family not in GENERAL_FAMILIES + BIPARTITE_FAMILIES:
            raise ArgumentError(f"unknown pattern family {self.family!r}")
        if self.n < 1 or self.k < 1:
            raise ArgumentError(f"pattern parameters must be positive: {self}")

    @property
    def bipartite(self) -> bool:
        return self.family in BIPARTITE_FAMILIES

    def complemented(self) -> "PatternSpec":
        return PatternSpec(_COMPLEMENT[self.family], self.n, self.k)

    def with_n(self, n: int) -> "PatternSpec":
        return PatternSpec(self.family, n, self.k)

    @property
    def name(self) -> str:
        f, n, k = self.family, self.n, self.k
        if f[0] in "GH":
            return f"{f}({n},{k})"
        return {
            "nK2": f"nK2({n})",
            "co_nK2": f"co-nK2({n})",
            "nKl": f"nKl({n},{k})",
            "co_nKl": f"co-nKl({n},{k})",
            "bip_matching": f"bip-nK2({n})",
            "bip_comatching": f"bip-co-nK2({n})",
            "bip_lambda": f"lambda({n},{k})",
            "bip_up": f"up({n},{k})",
            "bip_co_lambda": f"co-lambda({n},{k})",
            "bip_co_up": f"co-up({n},{k})",
        }[f]

    def __str__(self) -> str:
        return self.name


_NAME_RE = re.compile(r"^\s*([A-Za-z0-9_\-]+?)\s*\(\s*(\d+)\s*(?:,\s*(\d+)\s*)?\)\s*$")
_SHORT_RE = re.compile(r"^\s*(\d+)K(\d+)\s*$")

_NAME_TO_FAMILY = {
    "nK2": "nK2", "co-nK2": "co_nK2", "nKl": "nKl", "co-nKl": "co_nKl",
    "bip-nK2": "bip_matching", "bip-co-nK2": "bip_comatching",
    "lambda": "bip_lambda", "up": "bip_up", "co-lambda": "bip_co_lambda", "co-up": "bip_co_up",
    **{f"{x}{i}": f"{x}{i}" for x in "GH" for i in range(1, 5)},
}


def parse_pattern(name: str, bipartite: bool = False) -> PatternSpec:
    """Parse a pattern name such as ``G2(4,3)``, ``co-lambda(2,1)`` or ``2K2``.

    With ``bipartite=True`` the matching names ``nK2``/``co-nK2`` (and the
    shorthands ``2K2``, ``C6``) resolve to the bipartite matching/co-matching
    families instead of the general-graph ones.
    """
    text = name.strip()
    short = _SHORT_RE.match(text)
    if short:
        n, l = int(short.group(1)), int(short.group(2))
        if l == 2:
            return PatternSpec("bip_matching" if bipartite else "nK2", n)
        return PatternSpec("nKl", n, l)
    if text == "C4":
        return PatternSpec("bip_comatching" if bipartite else "co_nK2", 2)
    if text == "C6" and bipartite:
        return PatternSpec("bip_comatching", 3)
    m = _NAME_RE.match(text)
    if not m or m.group(1) not in _NAME_TO_FAMILY:
        raise ArgumentError(f"unknown pattern name {name!r}")
    family = _NAME_TO_FAMILY[m.group(1)]
    if bipartite and family == "nK2":
        family = "bip_matching"
    elif bipartite and family == "co_nK2":
        family = "bip_comatching"
    n = int(m.group(2))
    k = int(m.group(3)) if m.group(3) else 1
    needs_k = family[0] in "GH" or family in ("nKl", "co_nKl", "bip_lambda", "bip_up", "bip_co_lambda", "bip_co_up")
    if needs_k and m.group(3) is None:
        raise ArgumentError(f"pattern {name!r} needs two parameters")
    if not needs_k and m.group(3) is not None:
        raise ArgumentError(f"pattern {name!r} takes one parameter")
    return PatternSpec(family, n, k)


def parse_pattern_list(text: str, bipartite: bool = False) -> list[PatternSpec]:
    """Split a ``;``/``+``/whitespace separated list of pattern names.

    Commas are part of names, so they only separate items outside parentheses.
    """
    items, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if depth == 0 and ch in ",;+ \t\n":
            items.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    items.append("".join(cur))
    return [parse_pattern(t, bipartite) for t in items if t.strip()]


# ---------------------------------------------------------------------------
# Pattern construction
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _Layout:
    """Pattern graph plus the symmetry information used by the search."""

    graph: Graph
    units: tuple[tuple[int, ...], ...]
    sides: tuple[int, ...] | None  # 0 = top, 1 = bottom; None for general patterns


def _star_forest(n: int, k: int, centre_clique: bool, leaf_clique: bool) -> tuple[Graph, tuple[tuple[int, ...], ...]]:
    size = n * (k + 1)
    rows = [0] * size
    units = []
    centres, leaves = [], []
    for s in range(n):
        c = s * (k + 1)
        unit = tuple(range(c, c + k + 1))
        units.append(unit)
        centres.append(c)
        for leaf in unit[1:]:
            leaves.append(leaf)
            rows[c] |= 1 << leaf
            rows[leaf] |= 1 << c
    for group, on in ((centres, centre_clique), (leaves, leaf_clique)):
        if on:
            for u in group:
                for v in group:
                    if u != v:
                        rows[u] |= 1 << v
    return Graph(size, tuple(rows)), tuple(units)


@lru_cache(maxsize=None)
def _layout(spec: PatternSpec) -> _Layout:
    f, n, k = spec.family, spec.n, spec.k
    if f[0] in "GH":
        variant = int(f[1])
        g, units = _star_forest(n, k, variant in (2, 4), variant in (3, 4))
        return _Layout(complement(g) if f[0] == "H" else g, units, None)
    if f in ("nK2", "co_nK2"):
        g, units = _star_forest(n, 1, False, False)
        return _Layout(complement(g) if f == "co_nK2" else g, units, None)
    if f in ("nKl", "co_nKl"):
        size = n * k
        rows = [0] * size
        units = []
        for s in range(n):
            unit = tuple(range(s * k, s * k + k))
            units.append(unit)
            for u in unit:
                for v in unit:
                    if u != v:
                        rows[u] |= 1 << v
        g = Graph(size, tuple(rows))
        return _Layout(complement(g) if f == "co_nKl" else g, tuple(units), None)
    # bipartite families, laid out as a general graph with explicit sides
    bip = _bipartite_pattern(spec)
    na = bip.a_size
    g = bip.to_graph()
    sides = tuple([0] * na + [1] * bip.b_size)
    star = 1 if f in ("bip_matching", "bip_comatching") else k
    units = []
    for s in range(n):
        if f in ("bip_up", "bip_co_up"):
            # centre s in B, leaves s*k.. in A
            units.append((na + s,) + tuple(range(s * star, s * star + star)))
        else:
            units.append((s,) + tuple(na + j for j in range(s * star, s * star + star)))
    return _Layout(g, tuple(units), sides)


def _bipartite_pattern(spec: PatternSpec) -> BipartiteGraph:
    f, n, k = spec.family, spec.n, spec.k
    if f in ("bip_matching", "bip_comatching"):
        k = 1
    if f in ("bip_up", "bip_co_up"):
        base = _bipartite_pattern(PatternSpec("bip_lambda", n, k)).swap_sides()
        return bipartite_complement(base) if f == "bip_co_up" else base
    # nΛ_k: centre s in A, leaves s*k .. s*k+k-1 in B
    rows = tuple(((1 << k) - 1) << (s * k) for s in range(n))
    base = BipartiteGraph(n, n * k, rows)
    if f in ("bip_comatching", "bip_co_lambda"):
        return bipartite_complement(base)
    return base


def build_pattern(spec: PatternSpec) -> Graph | BipartiteGraph:
    """The literal pattern graph named by ``spec``.

    Star families place star ``s`` on vertices ``s*(k+1) .. s*(k+1)+k`` with the
    centre first.  Bipartite stars ``Λ_k`` have their centre in the top side,
    ``⊓_k`` in the bottom side.
    """
    if spec.bipartite:
        return _bipartite_pattern(spec)
    return _layout(spec).graph


# ---------------------------------------------------------------------------
# Generic backtracking search
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Embedding:
    """Injective, induced, side-respecting vertex map pattern -> host.

    For general hosts ``mapping[i]`` is the host vertex of pattern vertex ``i``.
    For bipartite hosts ``top``/``bottom`` map the pattern's sides into the
    host's sides.
    """

    mapping: tuple[int, ...] = ()
    top: tuple[int, ...] = ()
    bottom: tuple[int, ...] = ()

    def to_json(self) -> dict:
        if self.top or self.bottom:
            return {"top": list(self.top), "bottom": list(self.bottom)}
        return {"map": list(self.mapping)}


def _twin_predecessor(g: Graph, units, sides=None) -> dict[int, int]:
    """For each vertex, the previous same-side vertex of its unit that is a twin of it."""
    prev = {}
    for unit in units:
        for idx, v in enumerate(unit):
            for u in reversed(unit[:idx]):
                if sides is not None and sides[u] != sides[v]:
                    continue
                if g.adj[u] & ~(1 << v) == g.adj[v] & ~(1 << u):
                    prev[v] = u
                    break
    return prev


def _search(host_adj: tuple[int, ...], host_n: int, layout: _Layout, allowed: tuple[int, ...] | None) -> list[int] | None:
    pat = layout.graph
    order = [v for unit in layout.units for v in unit]
    order += [v for v in range(pat.n) if v not in set(order)]
    pos = {v: i for i, v in enumerate(order)}
    twin_prev = _twin_predecessor(pat, layout.units, layout.sides)
    unit_first = {}
    for ui, unit in enumerate(layout.units):
        if ui > 0 and _units_interchangeable(pat, layout.units[ui - 1], unit):
            unit_first[unit[0]] = layout.units[ui - 1][0]

    full = (1 << host_n) - 1
    non_adj = tuple(full ^ row ^ (1 << v) for v, row in enumerate(host_adj))
    deg = [row.bit_count() for row in host_adj]
    p = pat.n
    # static candidate masks from degree bounds (and sides)
    static = []
    for v in order:
        need_deg = pat.adj[v].bit_count()
        need_non = p - 1 - need_deg
        m = 0
        for h in range(host_n):
            if deg[h] >= need_deg and host_n - 1 - deg[h] >= need_non:
                m |= 1 << h
        if allowed is not None:
            m &= allowed[v]
        static.append(m)
    # pattern adjacency restricted to earlier vertices in search order
    earlier_adj = []
    for i, v in enumerate(order):
        earlier_adj.append([(j, bool(pat.adj[v] >> order[j] & 1)) for j in range(i)])

    image = [0] * p
    used = 0

    def rec(i: int) -> bool:
        nonlocal used
        if i == p:
            return True
        v = order[i]
        cand = static[i] & ~used
        for j, adjacent in earlier_adj[i]:
            cand &= host_adj[image[j]] if adjacent else non_adj[image[j]]
            if not cand:
                return False
        floor = -1
        if v in twin_prev:
            floor = image[pos[twin_prev[v]]]
        if v in unit_first:
            floor = max(floor, image[pos[unit_first[v]]])
        if floor >= 0:
            cand &= ~((1 << (floor + 1)) - 1)
        while cand:
            low = cand & -cand
            h = low.bit_length() - 1
            cand ^= low
            image[i] = h
            used |= low
            if rec(i + 1):
                return True
            used ^= low
        return False

    if p > host_n:
        return None
    if not rec(0):
        return None
    result = [0] * p
    for i, v in enumerate(order):
        result[v] = image[i]
    return result


def _units_interchangeable(g: Graph, u1: tuple[int, ...], u2: tuple[int, ...]) -> bool:
    """True when swapping ``u1`` and ``u2`` position-wise is an automorphism of ``g``."""
    if len(u1) != len(u2):
        return False
    perm = list(range(g.n))
    for a, b in zip(u1, u2):
        perm[a], perm[b] = b, a
    for v in range(g.n):
        row = 0
        for u in bits(g.adj[v]):
            row |= 1 << perm[u]
        if row != g.adj[perm[v]]:
            return False
    return True


def find_induced(host: Graph, spec: PatternSpec) -> Embedding | None:
    """Witness of an induced copy of the pattern in ``host``, or ``None``."""
    if spec.bipartite:
        raise ArgumentError("use find_induced_bipartite for bipartite patterns")
    found = _search(host.adj, host.n, _layout(spec), None)
    return None if found is None else Embedding(mapping=tuple(found))


def find_induced_bipartite(host: BipartiteGraph, spec: PatternSpec) -> Embedding | None:
    """Side-respecting induced embedding of a bipartite pattern, or ``None``."""
    if not spec.bipartite:
        raise ArgumentError(f"pattern {spec.name} is not a bipartite family")
    layout = _layout(spec)
    hg = host.to_graph()
    top_mask = host.full_a
    bottom_mask = host.full_b << host.a_size
    allowed = tuple(top_mask if s == 0 else bottom_mask for s in layout.sides)
    found = _search(hg.adj, hg.n, layout, allowed)
    if found is None:
        return None
    na_pat = sum(1 for s in layout.sides if s == 0)
    top = tuple(found[:na_pat])
    bottom = tuple(h - host.a_size for h in found[na_pat:])
    return Embedding(top=top, bottom=bottom)


# ---------------------------------------------------------------------------
# Fast specialised tests for bipartite star forests
# ---------------------------------------------------------------------------


def find_star_forest(rows: tuple[int, ...] | list[int], n: int, k: int) -> list[tuple[int, list[int]]] | None:
    """Centres and leaves of ``n`` induced stars ``K_{1,k}`` centred in the row side.

    ``rows[c]`` is the neighbourhood of candidate centre ``c``.  Returns
    ``[(centre, [leaf, ...]), ...]`` or ``None``.
    """
    cands = [c for c, row in enumerate(rows) if row.bit_count() >= k]
    if len(cands) < n:
        return None
    chosen: list[int] = []
    private: list[int] = []

    def rec(start: int, union: int) -> bool:
        if len(chosen) == n:
            return True
        for idx in range(start, len(cands) - (n - len(chosen)) + 1):
            c = cands[idx]
            row = rows[c]
            mine = row & ~union
            if mine.bit_count() < k:
                continue
            shrunk = [p & ~row for p in private]
            if any(p.bit_count() < k for p in shrunk):
                continue
            saved = private[:]
            private[:] = shrunk
            private.append(mine)
            chosen.append(c)
            if rec(idx + 1, union | row):
                return True
            chosen.pop()
            private[:] = saved
        return False

    if not rec(0, 0):
        return None
    return [(c, list(bits(p))[:k]) for c, p in zip(chosen, private)]


def detect_bipartite(host: BipartiteGraph, spec: PatternSpec) -> Embedding | None:
    """Fast path for the bipartite families (same answers as :func:`find_induced_bipartite`)."""
    f, n = spec.family, spec.n
    k = 1 if f in ("bip_matching", "bip_comatching") else spec.k
    if f in ("bip_matching", "bip_lambda"):
        rows, swapped = host.rows, False
    elif f in ("bip_comatching", "bip_co_lambda"):
        rows, swapped = bipartite_complement(host).rows, False
    elif f == "bip_up":
        rows, swapped = host.cols, True
    elif f == "bip_co_up":
        rows, swapped = bipartite_complement(host).cols, True
    else:
        raise ArgumentError(f"pattern {spec.name} is not a bipartite family")
    found = find_star_forest(rows, n, k)
    if found is None:
        return None
    centres = tuple(c for c, _ in found)
    leaves = tuple(l for _, ls in found for l in ls)
    if swapped:
        return Embedding(top=leaves, bottom=centres)
    return Embedding(top=centres, bottom=leaves)


def twin_star_witness(host: BipartiteGraph, s: int, orientation: Literal["lambda", "up"]) -> tuple[int, int] | None:
    """A pair of same-side vertices each with ``>= s`` private neighbours, if any."""
    rows = host.rows if orientation == "lambda" else host.cols
    if s <= 0:
        return (0, 1) if len(rows) >= 2 else None
    heavy = [(v, row) for v, row in enumerate(rows) if row.bit_count() >= s]
    for i, (u, ru) in enumerate(heavy):
        for v, rv in heavy[i + 1:]:
            if (ru & ~rv).bit_count() >= s and (rv & ~ru).bit_count() >= s:
                return (u, v)
    return None


def is_twin_star_free(host: BipartiteGraph, s: int, orientation: Literal["lambda", "up"] = "lambda") -> bool:
    """``True`` iff ``host`` has no induced ``2Λ_s`` (``orientation='lambda'``) or ``2⊓_s``."""
    if orientation not in ("lambda", "up"):
        raise ArgumentError(f"orientation must be 'lambda' or 'up', not {orientation!r}")
    return twin_star_witness(host, s, orientation) is None


def contains(host: Graph | BipartiteGraph, spec: PatternSpec) -> Embedding | None:
    """Dispatch to the fastest available exact test for ``spec`` on ``host``."""
    if isinstance(host, BipartiteGraph):
        return detect_bipartite(host, spec)
    return find_induced(host, spec)


def first_violation(host: Graph | BipartiteGraph, specs) -> tuple[PatternSpec, Embedding] | None:
    for spec in specs:
        emb = contains(host, spec)
        if emb is not None:
            return spec, emb
    return None


def family_F(n: int, k: int) -> list[PatternSpec]:
    """The eight graphs built from ``n`` disjoint ``K_{1,k}``."""
    return [PatternSpec(f"{x}{i}", n, k) for x in "GH" for i in range(1, 5)]
