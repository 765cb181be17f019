"""Partitions of bipartite graphs without star forests and their complements.

The pipeline for a bipartite graph free of ``n'⊓_k``, ``n''Λ_k``,
``co-m'⊓_k`` and ``co-m''Λ_k`` is

1. :func:`d_template_procedure` builds alternating bags ``B_1, A_1, B_2, ...``
   from minimum-degree seeds and covering structures, and marks the vertices
   (``M``, ``N``) that break the backward slack conditions;
2. :func:`refine_consecutive` splits bags so that consecutive bag pairs lose
   one star from one of the forbidden multiplicities;
3. :func:`collapse_d_template` merges bags by parity and seed membership;
4. :func:`star_induction_step` adds the marked classes, and
   :func:`partition_either` recurses until every block pair avoids two twin
   stars of one orientation;
5. :func:`orand_refine` (twice) upgrades that to both orientations.

Bag indices are 0-based throughout.  Every declared guarantee is re-checked
with the detectors before it is returned.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable

from . import bounds
from .cochromatic import _greedy_cochromatic, _kind, _require_free, min_cochromatic
from .errors import ArgumentError, ContractError, SizeLimitError
from .graph import BipartiteGraph, Graph, LabelledPartition, VertexSet, bits, to_mask
from .matching import require_free
from .patterns import PatternSpec, family_F, twin_star_witness
from .refine import PairResult, bipartite_partition, check_tags, general_partition, lift, refine_bipartite, refine_general


def up(n: int, k: int) -> PatternSpec:
    return PatternSpec("bip_up", n, k)


def lam(n: int, k: int) -> PatternSpec:
    return PatternSpec("bip_lambda", n, k)


def co_up(n: int, k: int) -> PatternSpec:
    return PatternSpec("bip_co_up", n, k)


def co_lam(n: int, k: int) -> PatternSpec:
    return PatternSpec("bip_co_lambda", n, k)


@dataclass(frozen=True)
class StarParams:
    """Forbidden multiplicities: ``n_up`` stars ``⊓_k`` (centres in B), ``n_lambda``
    stars ``Λ_k`` (centres in A) and the bipartite complements ``m_up``, ``m_lambda``.

    ``r`` defaults to ``k * n``.
    """

    n_up: int
    n_lambda: int
    m_up: int
    m_lambda: int
    k: int
    r: int = 0

    def __post_init__(self):
        if min(self.quad) < 1 or self.k < 1 or self.r < 0:
            raise ArgumentError(f"star parameters must be positive: {self}")
        if self.r == 0:
            object.__setattr__(self, "r", self.k * self.n)

    @classmethod
    def uniform(cls, n: int, k: int) -> "StarParams":
        return cls(n, n, n, n, k)

    @property
    def quad(self) -> tuple[int, int, int, int]:
        return (self.n_up, self.n_lambda, self.m_up, self.m_lambda)

    @property
    def n(self) -> int:
        return max(self.quad)

    @property
    def d(self) -> int:
        return (self.n - 1) * self.r + self.k * self.r

    @property
    def mu(self) -> int:
        return sum(self.quad)

    def specs(self) -> list[PatternSpec]:
        return [up(self.n_up, self.k), lam(self.n_lambda, self.k), co_up(self.m_up, self.k), co_lam(self.m_lambda, self.k)]

    def to_json(self) -> dict:
        return {"n_up": self.n_up, "n_lambda": self.n_lambda, "m_up": self.m_up, "m_lambda": self.m_lambda,
                "k": self.k, "r": self.r, "n": self.n, "d": self.d, "mu": self.mu}


def _first(mask: int, count: int) -> tuple[int, ...]:
    out = []
    for v in bits(mask):
        if len(out) == count:
            break
        out.append(v)
    return tuple(out)


# ---------------------------------------------------------------------------
# Covering
# ---------------------------------------------------------------------------


def _best_subset(cands: list[int], rows, size: int, exhaustive: bool) -> tuple[int, ...]:
    """``size`` candidates with the largest neighbourhood union (first maximum in id order)."""
    if exhaustive:
        best, best_cov = None, -1
        for combo in combinations(cands, size):
            cov = 0
            for c in combo:
                cov |= rows[c]
            cnt = cov.bit_count()
            if cnt > best_cov:
                best, best_cov = combo, cnt
        return best
    chosen, cov = [], 0
    pool = list(cands)
    for _ in range(size):
        c = max(pool, key=lambda v: ((rows[v] | cov).bit_count(), -v))
        pool.remove(c)
        chosen.append(c)
        cov |= rows[c]
    return tuple(sorted(chosen))


def _cover(rows, centres: int, n: int, r: int, exhaustive: bool = True) -> tuple[int, int, int]:
    """``(W, W', B^c)`` for the centre set ``centres``; ``rows[c]`` is the neighbourhood of ``c``."""
    if n < 2:
        raise ArgumentError("covering needs n >= 2")
    alive = list(bits(centres))
    if len(alive) < (n - 1) * r:
        raise ArgumentError(f"covering needs at least {(n - 1) * r} centres, got {len(alive)}")
    w, last, common = 0, 0, None
    for _ in range(r):
        s = _best_subset(alive, rows, n - 1, exhaustive)
        cov = 0
        for c in s:
            cov |= rows[c]
        common = cov if common is None else common & cov
        last = to_mask(s)
        w |= last
        alive = [c for c in alive if not last >> c & 1]
    return w, last, common


def lambda_cover_set(b: BipartiteGraph, n: int, k: int) -> VertexSet:
    """At most ``n-1`` top vertices ``S`` with ``|N(a) \\ N(S)| < k`` for every top ``a``."""
    if n < 1 or k < 1:
        raise ArgumentError("n and k must be positive")
    if b.a_size <= n - 1:
        return VertexSet.of("top", range(b.a_size))
    return VertexSet.of("top", _best_subset(list(range(b.a_size)), b.rows, n - 1, True))


def r_cover_structure(b: BipartiteGraph, n: int, k: int, r: int, exhaustive: bool = True) -> tuple[VertexSet, VertexSet, VertexSet]:
    """``W`` (top, ``(n-1)r`` vertices), ``W'`` (its last ``n-1``) and ``B^c`` (bottom).

    ``B^c`` is ``r``-covered by ``W`` and covered by ``W'``; each top vertex
    outside ``W`` has fewer than ``kr`` neighbours outside ``B^c``.
    """
    if r < 1:
        raise ArgumentError("r must be positive")
    w, last, common = _cover(b.rows, b.full_a, n, r, exhaustive)
    return VertexSet.of("top", bits(w)), VertexSet.of("top", bits(last)), VertexSet.of("bottom", bits(common))


def cover_violations(b: BipartiteGraph, n: int, k: int, r: int, w: VertexSet, wp: VertexSet, bc: VertexSet) -> list[str]:
    """Postconditions of :func:`r_cover_structure`, as readable failures."""
    out = []
    wm, wpm, bcm = w.mask, wp.mask, bc.mask
    if len(w) != (n - 1) * r:
        out.append(f"|W| = {len(w)} != {(n - 1) * r}")
    if len(wp) != n - 1 or wpm & ~wm:
        out.append("W' is not an (n-1)-subset of W")
    for v in bits(bcm):
        if (b.cols[v] & wm).bit_count() < r:
            out.append(f"bottom {v} has fewer than {r} neighbours in W")
        if not b.cols[v] & wpm:
            out.append(f"bottom {v} is not covered by W'")
    for a in range(b.a_size):
        if not wm >> a & 1 and (b.rows[a] & ~bcm).bit_count() >= k * r:
            out.append(f"top {a} has {(b.rows[a] & ~bcm).bit_count()} neighbours outside B^c")
    for a in bits(wpm):
        if (b.rows[a] & ~bcm).bit_count() > k * r:
            out.append(f"W' vertex {a} has too many neighbours outside B^c")
    return out


def high_degree_vertices(b: BipartiteGraph, k: int, bound_d: int) -> VertexSet:
    """Top vertices of degree at least ``k``, given bottom degrees at most ``bound_d``."""
    for v, col in enumerate(b.cols):
        if col.bit_count() > bound_d:
            raise ContractError(f"bottom vertex {v} has degree {col.bit_count()} > {bound_d}")
    return VertexSet.of("top", (a for a, row in enumerate(b.rows) if row.bit_count() >= k))


# ---------------------------------------------------------------------------
# Traces of marked vertices
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Trace:
    vertex: int
    lo: int
    hi: int

    def __post_init__(self):
        if self.lo > self.hi:
            raise ArgumentError(f"trace of {self.vertex} has lo > hi")


def partition_marked(traces: Iterable[Trace], c: int, side: str = "top") -> list[VertexSet]:
    """Classes whose traces are pairwise separated by at least two unused indices.

    First fit over traces sorted by ``lo``: a trace joins the first class whose
    last trace ends at least three indices before it starts.  The number of
    classes is the largest number of traces meeting any window ``[l-2, l]``,
    which is at most ``3 * max_l T_l``.
    """
    traces = sorted(traces, key=lambda t: (t.lo, t.vertex))
    load: dict[int, int] = {}
    for t in traces:
        for l in range(t.lo, t.hi + 1):
            load[l] = load.get(l, 0) + 1
    for l, cnt in sorted(load.items()):
        if 3 * cnt > c:
            raise ContractError(f"{cnt} traces contain index {l}, more than c/3 = {c / 3:g}")
    classes: list[list[Trace]] = []
    for t in traces:
        for cls in classes:
            if cls[-1].hi + 2 < t.lo:
                cls.append(t)
                break
        else:
            classes.append([t])
    if len(classes) > c:
        raise ContractError(f"{len(classes)} marked classes exceed c = {c}")
    return [VertexSet.of(side, (t.vertex for t in cls)) for cls in classes]


# ---------------------------------------------------------------------------
# d-templates
# ---------------------------------------------------------------------------


@dataclass
class DTemplate:
    """Bags ``A_i``, ``B_i`` with the construction sets of the procedure.

    ``primes_a[i]`` / ``primes_b[i]`` are the covering sets ``A_i'``/``B_i'``
    (empty when the bag was not built by covering); ``cc_a[i]`` is the
    ``(n-1)``-set of ``A_i'`` covering ``B_{i+1}^+`` in the complement and
    ``cc_b[i]`` the one of ``B_i'`` covering ``A_i^+`` (``{b}`` for seeds).
    """

    bags_a: list[list[int]]
    bags_b: list[list[int]]
    plus_a: list[list[int]]
    plus_b: list[list[int]]
    primes_a: list[list[int]]
    primes_b: list[list[int]]
    cc_a: dict[int, list[int]]
    cc_b: dict[int, list[int]]
    start: list[int]
    params: StarParams
    marked_a: list[int] = field(default_factory=list)
    marked_b: list[int] = field(default_factory=list)
    traces_a: list[Trace] = field(default_factory=list)
    traces_b: list[Trace] = field(default_factory=list)
    pieces_a: list[list[list[int]]] | None = None
    pieces_b: list[list[list[int]]] | None = None
    q: int | None = None
    host: BipartiteGraph | None = field(default=None, repr=False, compare=False)

    @property
    def z(self) -> int:
        return len(self.bags_a)

    @property
    def d(self) -> int:
        return self.params.d

    @property
    def refined(self) -> bool:
        return self.pieces_a is not None

    def to_json(self) -> dict:
        p = self.params
        out = {
            "bags_a": self.bags_a, "bags_b": self.bags_b,
            "plus_a": self.plus_a, "plus_b": self.plus_b,
            "q": self.q or 1, "d": self.d, "I": sorted(self.start),
            "marked_a": self.marked_a, "marked_b": self.marked_b,
            "params": {"n_up": p.n_up, "m_up": p.m_up, "m_lambda": p.m_lambda, "k": p.k, "q": self.q or 1, "d": self.d},
        }
        if self.refined:
            out["pieces_a"] = self.pieces_a
            out["pieces_b"] = self.pieces_b
        return out


def d_template_procedure(b: BipartiteGraph, p: StarParams, exhaustive: bool = True, check: bool = True) -> DTemplate:
    """Run the bag construction and mark the vertices with too much backward slack."""
    if p.n < 2:
        raise ArgumentError("the template procedure needs max multiplicity >= 2")
    if check:
        require_free(b, p.specs())
    n, k, r, d = p.n, p.k, p.r, p.d
    big = (n - 1) * r
    rows, cols = b.rows, b.cols
    full_a, full_b = b.full_a, b.full_b
    A: dict[int, int] = {}
    Ap: dict[int, int] = {}
    B: dict[int, int] = {}
    Bp: dict[int, int] = {}
    Aprime: dict[int, int] = {}
    Bprime: dict[int, int] = {}
    cc_a: dict[int, int] = {}
    cc_b: dict[int, int] = {}
    start: list[int] = []
    state = {"a": 0, "b": 0}  # assigned masks

    def seed(i: int) -> None:
        alive_a = full_a & ~state["a"]
        v = min(bits(full_b & ~state["b"]), key=lambda u: ((cols[u] & alive_a).bit_count(), u))
        B[i] = Bp[i] = cc_b[i] = 1 << v
        state["b"] |= 1 << v
        Ap[i] = cols[v] & alive_a
        start.append(i)

    def finish(i: int) -> None:
        B[i] = Bp[i] = 0
        A[i] = Ap[i] = full_a & ~state["a"]
        state["a"] = full_a

    if not full_b:
        finish(0)
    else:
        seed(0)
        i, phase = 0, "a"
        guard = 4 * (b.a_size + b.b_size) + 8
        while True:
            guard -= 1
            if guard < 0:
                raise ContractError("template procedure made no progress (input outside the class?)")
            if phase == "a":
                brem = full_b & ~state["b"]
                if Ap[i].bit_count() >= big:
                    crow = {a: ~rows[a] & brem for a in bits(Ap[i])}
                    w, wp, bc = _cover(crow, Ap[i], n, r, exhaustive)
                    Aprime[i], cc_a[i] = w, wp
                    rest = brem & ~bc
                    drop = to_mask(a for a in bits(w) if (crow[a] & rest).bit_count() > k * r)
                    A[i] = Ap[i] & ~drop
                    state["a"] |= A[i]
                    Bp[i + 1] = bc
                    i, phase = i + 1, "b"
                else:
                    A[i] = 0
                    if not brem:
                        finish(i + 1)
                        break
                    seed(i + 1)
                    i += 1
            else:
                arem = full_a & ~state["a"]
                if Bp[i].bit_count() >= big:
                    crow = {v: cols[v] & arem for v in bits(Bp[i])}
                    w, wp, ac = _cover(crow, Bp[i], n, r, exhaustive)
                    Bprime[i], cc_b[i], Ap[i] = w, wp, ac
                    rest = arem & ~ac
                    drop = to_mask(v for v in bits(w) if (crow[v] & rest).bit_count() > k * r)
                    B[i] = Bp[i] & ~drop
                    state["b"] |= B[i]
                    phase = "a"
                else:
                    B[i] = Ap[i] = A[i] = 0
                    if not full_b & ~state["b"]:
                        finish(i + 1)
                        break
                    seed(i + 1)
                    i, phase = i + 1, "a"

    z = max(A) + 1
    as_list = lambda dct: [sorted(bits(dct.get(i, 0))) for i in range(z)]
    t = DTemplate(
        bags_a=as_list(A), bags_b=as_list(B), plus_a=as_list(Ap), plus_b=as_list(Bp),
        primes_a=as_list(Aprime), primes_b=as_list(Bprime),
        cc_a={i: sorted(bits(m)) for i, m in cc_a.items()},
        cc_b={i: sorted(bits(m)) for i, m in cc_b.items()},
        start=start, params=p, host=b,
    )
    if sorted(v for bag in t.bags_a for v in bag) != list(range(b.a_size)):
        raise ContractError("top bags do not partition A")
    if sorted(v for bag in t.bags_b for v in bag) != list(range(b.b_size)):
        raise ContractError("bottom bags do not partition B")
    _mark(b, t)
    return t


def _prefixes(bags: list[list[int]]) -> list[int]:
    """``out[i]`` = union of ``bags[0..i-1]``."""
    out, acc = [0], 0
    for bag in bags:
        acc |= to_mask(bag)
        out.append(acc)
    return out


def _mark(b: BipartiteGraph, t: DTemplate) -> None:
    d, z = t.d, t.z
    pb = _prefixes(t.bags_b)
    pa = _prefixes(t.bags_a)
    before_b = lambda j: pb[j]  # B_0..B_{j-1}
    upto_a = lambda j: pa[max(j - 1, 0)]  # A_0..A_{j-2}
    t.traces_a, t.traces_b = [], []
    for i, bag in enumerate(t.bags_a):
        for v in bag:
            row = b.rows[v]
            if (row & before_b(i)).bit_count() > d:
                lo = next(j for j in range(i + 1) if (row & before_b(j)).bit_count() > d)
                t.traces_a.append(Trace(v, lo, i))
    for i, bag in enumerate(t.bags_b):
        for v in bag:
            col = b.cols[v]
            if (upto_a(i) & ~col).bit_count() > d:
                lo = next(j for j in range(i + 1) if (upto_a(j) & ~col).bit_count() > d)
                t.traces_b.append(Trace(v, lo, i))
    t.marked_a = sorted(tr.vertex for tr in t.traces_a)
    t.marked_b = sorted(tr.vertex for tr in t.traces_b)


def p_violations(b: BipartiteGraph, t: DTemplate) -> list[str]:
    """Conditions (P1)-(P4) of the construction, checked for every index by degree counting."""
    p, d = t.params, t.d
    kr = p.k * p.r
    pa, pb = _prefixes(t.bags_a), _prefixes(t.bags_b)
    out = []
    for i in range(t.z):
        # (P1) A_{i-1} has co-degree <= d in B \ (B_0..B_i)
        if i >= 1:
            rest = b.full_b & ~pb[i + 1]
            for v in t.bags_a[i - 1]:
                if (rest & ~b.rows[v]).bit_count() > d:
                    out.append(f"P1({i}): top {v}")
        rest2 = b.full_a & ~(pa[i] | to_mask(t.plus_a[i]))
        rest3 = b.full_a & ~pa[i + 1]
        for v in t.bags_b[i]:
            if (b.cols[v] & rest2).bit_count() > kr:
                out.append(f"P2({i}): bottom {v}")
            if (b.cols[v] & rest3).bit_count() > d:
                out.append(f"P3({i}): bottom {v}")
        nxt = to_mask(t.plus_b[i + 1]) if i + 1 < t.z else 0
        rest4 = b.full_b & ~(pb[i + 1] | nxt)
        for v in t.bags_a[i]:
            if (rest4 & ~b.rows[v]).bit_count() > kr:
                out.append(f"P4({i}): top {v}")
    return out


def template_violations(b: BipartiteGraph, t: DTemplate) -> list[str]:
    """Conditions (*) and (**) with slack ``d`` on ``A \\ M``, ``B \\ N``; for refined
    templates also the consecutive-pair freeness conditions."""
    d, z = t.d, t.z
    keep_a = b.full_a & ~to_mask(t.marked_a)
    keep_b = b.full_b & ~to_mask(t.marked_b)
    ma = [to_mask(bag) & keep_a for bag in t.bags_a]
    mb = [to_mask(bag) & keep_b for bag in t.bags_b]
    out = []
    for i in range(z):
        later_b = to_mask(v for h in range(i + 2, z) for v in bits(mb[h]))
        earlier_b = to_mask(v for h in range(i) for v in bits(mb[h]))
        for v in bits(ma[i]):
            row = b.rows[v]
            if (later_b & ~row).bit_count() > d:
                out.append(f"(*) top {v} in bag {i}: too many non-neighbours in later bags")
            if (earlier_b & row).bit_count() > d:
                out.append(f"(*) top {v} in bag {i}: too many neighbours in earlier bags")
        early_a = to_mask(v for h in range(i - 1) for v in bits(ma[h]))
        later_a = to_mask(v for h in range(i + 1, z) for v in bits(ma[h]))
        for v in bits(mb[i]):
            col = b.cols[v]
            if (early_a & ~col).bit_count() > d:
                out.append(f"(**) bottom {v} in bag {i}: too many non-neighbours in earlier bags")
            if (later_a & col).bit_count() > d:
                out.append(f"(**) bottom {v} in bag {i}: too many neighbours in later bags")
    if t.refined:
        for (x, y), specs in _consecutive_tags(t).items():
            (i, g), (j, h) = x, y
            sub = b.induced(t.pieces_a[i][g], t.pieces_b[j][h])
            for spec in specs:
                if _detect(sub, spec):
                    out.append(f"refined pair A[{i}][{g}], B[{j}][{h}] contains {spec.name}")
    return out


def _detect(sub: BipartiteGraph, spec: PatternSpec) -> bool:
    from .patterns import detect_bipartite

    return detect_bipartite(sub, spec) is not None


def _consecutive_tags(t: DTemplate) -> dict:
    """``((i, g), (j, h)) -> specs`` for the consecutive piece pairs of a refined template."""
    p, k = t.params, t.params.k
    start = set(t.start)
    out = {}
    for i in range(t.z):
        for g, pa in enumerate(t.pieces_a[i]):
            if not pa:
                continue
            for h, pb in enumerate(t.pieces_b[i]):
                if pb:
                    out[((i, g), (i, h))] = (up(p.n_up - 1, k),)
            if i + 1 < t.z:
                spec = co_up(p.m_up - 1, k) if i in start else co_lam(p.m_lambda - 1, k)
                for h, pb in enumerate(t.pieces_b[i + 1]):
                    if pb:
                        out[((i, g), (i + 1, h))] = (spec,)
    return out


# ---------------------------------------------------------------------------
# Refinement of consecutive bags
# ---------------------------------------------------------------------------


def _initial_split(b: BipartiteGraph, t: DTemplate, i: int, exhaustive: bool) -> dict[int, tuple]:
    """Labels for ``B_{i+1}`` when ``i`` is a seed index."""
    p = t.params
    n, k = p.n, p.k
    before = to_mask(v for h in range(i) for v in t.bags_a[h])
    x = b.full_a & ~before & ~to_mask(t.plus_a[i])
    target = to_mask(t.plus_b[i + 1])
    crow = {a: b.rows[a] & target for a in bits(x)}
    if x.bit_count() >= (n - 1) * k:
        a_prime, _, _ = _cover(crow, x, n, k, exhaustive)
    else:
        a_prime = x
    labels = {}
    for v in t.bags_b[i + 1]:
        nb = b.cols[v] & a_prime
        labels[v] = ("c", _first(nb, k)) if nb.bit_count() >= k else ("s", v)
    return labels


def _general_split(b: BipartiteGraph, t: DTemplate, i: int) -> tuple[dict[int, tuple], dict[int, tuple]]:
    """Labels for ``A_i`` (by ``r`` neighbours in ``B_i'``) and ``B_{i+1}`` (exceptional singletons)."""
    r = t.params.r
    b_prime = to_mask(t.primes_b[i])
    la = {}
    for a in t.bags_a[i]:
        nb = b.rows[a] & b_prime
        la[a] = ("f", _first(nb, r)) if nb.bit_count() >= r else ("s", a)
    lb = {}
    if i + 1 < t.z and t.bags_b[i + 1]:
        bp_i = to_mask(t.plus_b[i])
        cc = t.cc_a.get(i - 1, [])
        non = 0
        for a in cc:
            non |= ~b.rows[a]
        bag = to_mask(t.bags_b[i + 1])
        special = (non & bag & ~bp_i) | (bp_i & bag)
        for v in t.bags_b[i + 1]:
            lb[v] = ("s", v) if special >> v & 1 else ("r",)
    return la, lb


def _general_split2(b: BipartiteGraph, t: DTemplate, i: int) -> tuple[dict[int, tuple], dict[int, tuple]]:
    """Labels for ``B_i`` (by ``r`` non-neighbours in ``A_{i-1}'``) and ``A_i`` (exceptional singletons)."""
    r = t.params.r
    a_prime = to_mask(t.primes_a[i - 1])
    lb = {}
    for v in t.bags_b[i]:
        non = a_prime & ~b.cols[v]
        lb[v] = ("f", _first(non, r)) if non.bit_count() >= r else ("s", v)
    ap_prev = to_mask(t.plus_a[i - 1])
    nb = 0
    for v in t.cc_b.get(i - 1, []):
        nb |= b.cols[v]
    bag = to_mask(t.bags_a[i])
    special = (nb & bag & ~ap_prev) | (ap_prev & bag)
    la = {a: ("s", a) if special >> a & 1 else ("r",) for a in t.bags_a[i]}
    return la, lb


def _pieces(bag: list[int], labelings: list[dict[int, tuple]]) -> list[list[int]]:
    groups: dict[tuple, list[int]] = {}
    for v in bag:
        key = tuple(lab.get(v, ()) for lab in labelings)
        groups.setdefault(key, []).append(v)
    return sorted(groups.values(), key=lambda blk: blk[0])


def refine_consecutive(t: DTemplate, exhaustive: bool = True, verify: bool = True) -> DTemplate:
    """Split bags so consecutive pairs satisfy the refined freeness conditions.

    Pieces are computed on the full bags, then restricted to the unmarked
    vertices and padded with empty pieces to a common count ``q``.
    """
    b, p = t.host, t.params
    if b is None:
        raise ArgumentError("template has no host graph")
    if min(p.n_up, p.m_up, p.m_lambda) < 2:
        raise ArgumentError("refinement needs n_up, m_up, m_lambda >= 2")
    start = set(t.start)
    lab_a: list[list[dict]] = [[] for _ in range(t.z)]
    lab_b: list[list[dict]] = [[] for _ in range(t.z)]
    for i in range(t.z):
        if i + 1 < t.z and t.bags_a[i] and t.bags_b[i + 1]:
            if i in start:
                lab_b[i + 1].append(_initial_split(b, t, i, exhaustive))
            elif t.primes_b[i]:
                la, lb = _general_split(b, t, i)
                lab_a[i].append(la)
                lab_b[i + 1].append(lb)
        if i not in start and i >= 1 and t.bags_a[i] and t.bags_b[i] and t.primes_a[i - 1]:
            la, lb = _general_split2(b, t, i)
            lab_a[i].append(la)
            lab_b[i].append(lb)
    pi = bounds.pi_max(p.n, p.k, p.r)
    marked_a, marked_b = set(t.marked_a), set(t.marked_b)
    pieces_a, pieces_b = [], []
    for i in range(t.z):
        full_a = _pieces(t.bags_a[i], lab_a[i])
        full_b = _pieces(t.bags_b[i], lab_b[i])
        if max(len(full_a), len(full_b)) > bounds.sat_mul(pi, pi):
            raise ContractError(f"bag {i} split into more than pi^2 pieces")
        pieces_a.append([[v for v in blk if v not in marked_a] for blk in full_a])
        pieces_b.append([[v for v in blk if v not in marked_b] for blk in full_b])
    pieces_a = [[blk for blk in bag if blk] for bag in pieces_a]
    pieces_b = [[blk for blk in bag if blk] for bag in pieces_b]
    q = max([1] + [len(bag) for bag in pieces_a + pieces_b])
    for bag in pieces_a + pieces_b:
        bag.extend([] for _ in range(q - len(bag)))
    out = DTemplate(**{f: getattr(t, f) for f in (
        "bags_a", "bags_b", "plus_a", "plus_b", "primes_a", "primes_b", "cc_a", "cc_b", "start", "params",
        "marked_a", "marked_b", "traces_a", "traces_b")}, pieces_a=pieces_a, pieces_b=pieces_b, q=q, host=b)
    if verify:
        bad = template_violations(b, out)
        if bad:
            raise ContractError("refined template fails: " + "; ".join(bad[:5]))
    return out


# ---------------------------------------------------------------------------
# Collapse and the induction step
# ---------------------------------------------------------------------------


def _group(i: int, start: set[int]) -> int:
    """0: even index in I, 1: even not in I, 2: odd in I, 3: odd not in I (0-based indices)."""
    return 2 * (i % 2) + (0 if i in start else 1)


def collapse_d_template(t: DTemplate, verify: bool = True) -> PairResult:
    """``4q`` blocks per side; block ``4 * g + group`` holds piece ``g`` of every bag in the group.

    Empty blocks are kept so block indices are stable.
    """
    if not t.refined:
        raise ArgumentError("collapse needs a refined template")
    p, q, start = t.params, t.q, set(t.start)
    ks = p.k + 2 * t.d
    tops = [[] for _ in range(4 * q)]
    bottoms = [[] for _ in range(4 * q)]
    for i in range(t.z):
        grp = _group(i, start)
        for g in range(q):
            tops[4 * g + grp] += t.pieces_a[i][g]
            bottoms[4 * g + grp] += t.pieces_b[i][g]
    tags = {}
    for x in range(4 * q):
        ga = x % 4
        for y in range(4 * q):
            gb = y % 4
            if ga // 2 == gb // 2:
                tags[(x, y)] = (up(p.n_up - 1, ks),)
            elif ga % 2 == 0:
                tags[(x, y)] = (co_up(p.m_up - 1, ks),)
            else:
                tags[(x, y)] = (co_lam(p.m_lambda - 1, ks),)
    res = PairResult([sorted(blk) for blk in tops], [sorted(blk) for blk in bottoms], tags)
    if verify and t.host is not None:
        check_tags(t.host, res, "collapse_d_template: ")
    return res


def marked_classes(t: DTemplate) -> tuple[list[VertexSet], list[VertexSet]]:
    p = t.params
    c = bounds.marked_classes(p.n, p.k, t.d)
    return partition_marked(t.traces_a, c, "top"), partition_marked(t.traces_b, c, "bottom")


def _star_induction_step(b: BipartiteGraph, p: StarParams, exhaustive: bool = True) -> PairResult:
    t = refine_consecutive(d_template_procedure(b, p, exhaustive, check=False), exhaustive)
    res = collapse_d_template(t)
    m_cls, n_cls = marked_classes(t)
    ks = p.k + 2 * t.d
    lam_tag = (co_lam(p.m_lambda - 1, ks),)
    up_tag = (up(p.n_up - 1, ks),)
    nt, nb = len(res.tops), len(res.bottoms)
    tops = res.tops + [list(m) for m in m_cls]
    bottoms = res.bottoms + [list(m) for m in n_cls]
    tags = dict(res.tags)
    for x in range(nt, len(tops)):
        for y in range(len(bottoms)):
            tags[(x, y)] = lam_tag
    for x in range(nt):
        for y in range(nb, len(bottoms)):
            tags[(x, y)] = up_tag
    out = PairResult(tops, bottoms, tags).drop_empty()
    bound = bounds.induction_step_bound(p.n, p.k, p.r)
    if max(len(out.tops), len(out.bottoms)) > bound:
        raise ContractError(f"induction step emitted more than {bound} blocks")
    check_tags(b, out, "star_induction_step: ")
    return out


def star_induction_step(b: BipartiteGraph, p: StarParams, exhaustive: bool = True) -> LabelledPartition:
    """At most ``4 pi^2 + 3nkd^2`` blocks per side; every pair loses one star of one kind
    (with stars grown to ``k + 2d``)."""
    if min(p.quad) < 3:
        raise ArgumentError("the induction step needs all four multiplicities >= 3")
    require_free(b, p.specs())
    res = _star_induction_step(b, p, exhaustive)
    bound = bounds.induction_step_bound(p.n, p.k, p.r)
    return bipartite_partition(res, {"algorithm": "star-induction-step", **p.to_json(), "bound": bound})


# ---------------------------------------------------------------------------
# Either / or
# ---------------------------------------------------------------------------


def _child_quad(quad: tuple[int, int, int, int], spec: PatternSpec) -> tuple[int, int, int, int]:
    n_up, n_lambda, m_up, m_lambda = quad
    if spec.family == "bip_up":
        return (spec.n, n_lambda, m_up, m_lambda)
    if spec.family == "bip_co_up":
        return (n_up, n_lambda, spec.n, m_lambda)
    if spec.family == "bip_co_lambda":
        return (n_up, n_lambda, m_up, spec.n)
    raise ContractError(f"unexpected induction tag {spec.name}")


def _partition_either(b: BipartiteGraph, quad: tuple[int, int, int, int], k: int, exhaustive: bool = True) -> PairResult:
    n_up, n_lambda, m_up, m_lambda = quad
    if min(quad) <= 2:
        tag = (up(2, k),) if min(n_up, m_up) <= 2 else (lam(2, k),)
        return PairResult([list(range(b.a_size))], [list(range(b.b_size))], {(0, 0): tag})
    p = StarParams(*quad, k)
    step = _star_induction_step(b, p, exhaustive)

    def solve(top_ids, bottom_ids, i, j):
        (spec,) = step.tags[(i, j)]
        child = _partition_either(b.induced(top_ids, bottom_ids), _child_quad(quad, spec), spec.k, exhaustive)
        return lift(child, top_ids, bottom_ids)

    return refine_bipartite(step.tops, step.bottoms, solve)


def partition_either(b: BipartiteGraph, p: StarParams, exhaustive: bool = True) -> LabelledPartition:
    """Blocks whose pairs are each ``2Λ_s``-free or ``2⊓_s``-free."""
    require_free(b, p.specs())
    res = _partition_either(b, p.quad, p.k, exhaustive).drop_empty()
    check_tags(b, res, "partition_either: ")
    u_bound, s_bound = bounds.either_bounds(p.quad, p.k)
    if max(len(res.tops), len(res.bottoms)) > u_bound:
        raise ContractError(f"partition_either emitted more than U' = {u_bound} blocks")
    s = max([spec.k for specs in res.tags.values() for spec in specs] or [p.k])
    return bipartite_partition(res, {"algorithm": "partition-either", **p.to_json(), "s": s, "s_bound": s_bound, "bound": str(u_bound)})


# ---------------------------------------------------------------------------
# Orand refinement
# ---------------------------------------------------------------------------


def _orand(b: BipartiteGraph, s: int, n: int, k: int) -> list[list[int]]:
    """Classes of top vertices, each ``(2⊓_s, 2Λ_{2k-1})``-free against the whole bottom side."""
    rows, cols = b.rows, b.cols
    bags_a: list[int] = []
    bags_b: list[int] = []
    assigned_a = assigned_b = 0
    for _ in range(b.b_size):
        alive_a = b.full_a & ~assigned_a
        v = min(bits(b.full_b & ~assigned_b), key=lambda u: ((cols[u] & alive_a).bit_count(), u))
        assigned_b |= 1 << v
        rem_b = b.full_b & ~assigned_b
        plus = cols[v] & alive_a
        drop = to_mask(a for a in bits(plus) if (rem_b & ~rows[a]).bit_count() >= k)
        bags_b.append(1 << v)
        bags_a.append(plus & ~drop)
        assigned_a |= plus & ~drop
    bags_a.append(b.full_a & ~assigned_a)
    bags_b.append(0)
    delta = n * k * s * s
    c = n * k * delta * delta
    prefix, acc = [], 0
    for bag in bags_b:
        prefix.append(acc)
        acc |= bag
    traces = []
    for i, bag in enumerate(bags_a):
        for a in bits(bag):
            row = rows[a]
            if (row & prefix[i]).bit_count() >= k:
                lo = next(j for j in range(i + 1) if (row & prefix[j]).bit_count() >= k)
                traces.append(Trace(a, lo, i))
    classes = [list(cls) for cls in partition_marked(traces, 3 * c)]
    marked = to_mask(tr.vertex for tr in traces)
    rest = sorted(bits(b.full_a & ~marked))
    if rest:
        classes.append(rest)
    return classes


def _orand_check(b: BipartiteGraph, classes, s: int, k: int, context: str) -> None:
    for cls in classes:
        sub = b.induced(cls, range(b.b_size))
        for spec in (up(2, s), lam(2, 2 * k - 1)):
            if _detect(sub, spec):
                raise ContractError(f"{context}class {cls} contains {spec.name}")


def orand_refine(b: BipartiteGraph, s: int, n: int, k: int) -> LabelledPartition:
    """Split the top side into at most ``phi`` classes, each ``(2⊓_s, 2Λ_{2k-1})``-free against B."""
    if min(s, n, k) < 1:
        raise ArgumentError("s, n, k must be positive")
    require_free(b, [up(2, s), lam(n, k), co_lam(n, k)])
    classes = _orand(b, s, n, k)
    _orand_check(b, classes, s, k, "orand_refine: ")
    bound = bounds.phi(n, k, s)
    if len(classes) > bound:
        raise ContractError(f"orand emitted more than phi = {bound} classes")
    tag = (up(2, s), lam(2, 2 * k - 1))
    res = PairResult(classes, [list(range(b.b_size))] if b.b_size else [[]], {(x, 0): tag for x in range(len(classes))})
    return bipartite_partition(res.drop_empty(), {"algorithm": "orand", "s": s, "n": n, "k": k, "bound": bound})


def _orand_pair(b: BipartiteGraph, top_ids, bottom_ids, orientation: str, s: int, n: int, k: int, keep) -> PairResult:
    """Orand on one block pair.  ``orientation='up'`` splits the top block (pair is
    ``2⊓_s``-free), ``'lambda'`` splits the bottom block via the side swap."""
    sub = b.induced(top_ids, bottom_ids)
    kk = 2 * k - 1
    if orientation == "up":
        classes = _orand(sub, s, n, k)
        tag = tuple(keep) + (lam(2, kk),)
        res = PairResult(classes, [list(range(sub.b_size))], {(x, 0): tag for x in range(len(classes))})
    else:
        classes = _orand(sub.swap_sides(), s, n, k)
        tag = tuple(keep) + (up(2, kk),)
        res = PairResult([list(range(sub.a_size))], classes, {(0, y): tag for y in range(len(classes))})
    return lift(res, list(top_ids), list(bottom_ids))


def _bipartite_star(b: BipartiteGraph, p: StarParams, exhaustive: bool = True) -> PairResult:
    n, k = p.n, p.k
    kk = 2 * k - 1
    first = _partition_either(b, p.quad, k, exhaustive).drop_empty()

    def pass1(top_ids, bottom_ids, i, j):
        (spec,) = first.tags[(i, j)]
        orientation = "up" if spec.family == "bip_up" else "lambda"
        return _orand_pair(b, top_ids, bottom_ids, orientation, spec.k, n, k, (spec,))

    second = refine_bipartite(first.tops, first.bottoms, pass1)
    check_tags(b, second, "bipartite_star_partition (first pass): ")

    def pass2(top_ids, bottom_ids, i, j):
        specs = second.tags[(i, j)]
        # a pair that is already free of 2Λ_{2k-1} gets its bottom block split, and vice versa
        orientation = "lambda" if any(sp.family == "bip_lambda" and sp.k == kk for sp in specs[1:]) else "up"
        return _orand_pair(b, top_ids, bottom_ids, orientation, kk, n, k, ())

    third = refine_bipartite(second.tops, second.bottoms, pass2)
    final = (lam(2, kk), up(2, kk))
    third.tags = {key: final for key in third.tags}
    check_tags(b, third, "bipartite_star_partition: ")
    return third


def bipartite_star_partition(b: BipartiteGraph, p: StarParams, exhaustive: bool = True) -> LabelledPartition:
    """Blocks with every cross pair free of ``2Λ_{2k-1}`` and ``2⊓_{2k-1}``."""
    require_free(b, p.specs())
    res = _bipartite_star(b, p, exhaustive).drop_empty()
    bound = bounds.star_partition_bound(p.quad, p.k)
    if max(len(res.tops), len(res.bottoms)) > bound:
        raise ContractError("bipartite_star_partition exceeded U")
    return bipartite_partition(res, {"algorithm": "bipartite-stars", **p.to_json(), "bound": str(bound)})


# ---------------------------------------------------------------------------
# General graphs
# ---------------------------------------------------------------------------


def _merge_checked(g: Graph, blocks: list[list[int]], kinds: list[str], tag) -> tuple[list[list[int]], list[str]]:
    """Merge two blocks when the union is homogeneous and every pair with the union keeps ``tag``."""
    blocks, kinds = [list(b) for b in blocks], list(kinds)
    i = 0
    while i < len(blocks):
        for j in range(i + 1, len(blocks)):
            union = sorted(blocks[i] + blocks[j])
            mask = to_mask(union)
            kind = "clique" if g.is_clique(mask) else "independent" if g.is_independent(mask) else None
            if kind is None:
                continue
            others = [blk for x, blk in enumerate(blocks) if x not in (i, j)]
            if all(not _detect(g.bipartite_between(union, o), spec) for o in others for spec in tag):
                blocks[i], kinds[i] = union, kind
                del blocks[j], kinds[j]
                break
        else:
            i += 1
    return blocks, kinds


def main_partition(g: Graph, n: int, k: int, l: int, exact_limit: int = 16, max_vertices: int = 64) -> LabelledPartition:
    """Cliques and independent sets with every cross pair free of ``2Λ_{2k-1}`` and ``2⊓_{2k-1}``."""
    if min(n, k, l) < 1:
        raise ArgumentError("n, k, l must be positive")
    if g.n > max_vertices:
        raise SizeLimitError(f"{g.n} vertices exceed the limit of {max_vertices}")
    _require_free(g, family_F(n, k) + [PatternSpec("nKl", n, l), PatternSpec("co_nKl", n, l)])
    found = min_cochromatic(g) if g.n <= exact_limit else _greedy_cochromatic(g, g.full_mask)
    blocks = [sorted(bits(m)) for m, _ in found]
    kinds = [_kind(g, blk) for blk in blocks]
    p = StarParams.uniform(n, k)

    def solve(top_ids, bottom_ids, i, j):
        return lift(_bipartite_star(g.bipartite_between(top_ids, bottom_ids), p), top_ids, bottom_ids)

    refined, owner, _ = refine_general(blocks, solve)
    kk = 2 * k - 1
    tag = (lam(2, kk), up(2, kk))
    out_kinds = [kinds[o] for o in owner]
    refined, out_kinds = _merge_checked(g, refined, out_kinds, tag)
    tags = {(x, y): tag for x in range(len(refined)) for y in range(x + 1, len(refined))}
    for (x, y), specs in tags.items():
        sub = g.bipartite_between(refined[x], refined[y])
        for spec in specs:
            if _detect(sub, spec):
                raise ContractError(f"main_partition: blocks {x}, {y} contain {spec.name}")
    z = len(blocks)
    u = bounds.star_partition_bound(p.quad, k)
    bound = bounds.sat_mul(z, bounds.sat_pow(u, z))
    if len(refined) > bound:
        raise ContractError("main_partition exceeded z U^z blocks")
    return general_partition(g, refined, out_kinds, tags,
                             {"algorithm": "main", "n": n, "k": k, "l": l, "z": z, "exact": g.n <= exact_limit, "bound": str(bound)})
