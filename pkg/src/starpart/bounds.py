"""Closed-form block-count ceilings.

The recurrences grow as towers of exponentials, so every quantity saturates at
:data:`CAP`.  A saturated bound still works as a ceiling: emitted partitions
are always far smaller.
"""

from __future__ import annotations

from functools import lru_cache
from math import comb, lgamma, log

CAP = 1 << 256


def sat(x: int) -> int:
    return x if x < CAP else CAP


def sat_mul(*xs: int) -> int:
    out = 1
    for x in xs:
        out = sat(out * x)
    return out


def sat_pow(base: int, exp: int) -> int:
    if base <= 1:
        return base if exp > 0 else 1
    if exp >= 256 or base >= CAP:
        return CAP
    return sat(base**exp)


def sat_comb(n: int, k: int) -> int:
    """Binomial coefficient, saturated without computing huge values."""
    if k < 0 or k > n:
        return 0
    k = min(k, n - k)
    if k > 0 and (lgamma(n + 1) - lgamma(k + 1) - lgamma(n - k + 1)) / log(2) > 300:
        return CAP
    return sat(comb(n, k))


# --- matchings -------------------------------------------------------------


@lru_cache(maxsize=None)
def f_bipartite(n: int, m: int) -> int:
    """Blocks per side for a ``(nK2, co-mK2)``-free bipartite graph."""
    if n <= 2 or m <= 2:
        return 1
    two_q = 2 * (n - 1) * (m - 1)
    return sat_mul(two_q, sat_pow(max(f_bipartite(n, m - 1), f_bipartite(n - 1, m)), two_q))


def cochromatic_bound(n: int, m: int) -> int:
    """Blocks for a ``(nK2, co-mK2)``-free graph split into cliques/independent sets."""
    if n <= 1 or m <= 1:
        return 1
    return sat_mul(3, sat_pow(6, (n - 2) + (m - 2)))


def matching_partition_bound(n: int) -> int:
    z = cochromatic_bound(n, n)
    return sat_mul(z, sat_pow(f_bipartite(n, n), z))


# --- stars -----------------------------------------------------------------


def pi1(n: int, k: int) -> int:
    return sat(sat_comb(n * k, k) + sat_mul(n, sat_pow(k, 5)))


def pi2(n: int, r: int) -> int:
    return sat_comb((n - 1) * r, r)


def pi3(n: int, k: int, r: int) -> int:
    return sat_mul(n - 1, r, k + 1)


def join_slack(n: int, k: int, r: int | None = None) -> int:
    """``d = kr + (n-1)r`` with ``r = kn`` unless given."""
    r = k * n if r is None else r
    return k * r + (n - 1) * r


def pi_max(n: int, k: int, r: int | None = None) -> int:
    r = k * n if r is None else r
    return max(pi1(n, k), pi2(n, r), pi3(n, k, r))


def marked_classes(n: int, k: int, d: int) -> int:
    """``c = 3nkd^2`` classes for the marked vertices of one side."""
    return sat_mul(3, n, k, d, d)


def induction_step_bound(n: int, k: int, r: int | None = None) -> int:
    d = join_slack(n, k, r)
    p = pi_max(n, k, r)
    return sat(sat_mul(4, p, p) + marked_classes(n, k, d))


def either_bounds(quad: tuple[int, int, int, int], k: int) -> tuple[int, int]:
    """``(U', s)`` for multiplicities ``(n_up, n_lambda, m_up, m_lambda)``.

    Each step moves to the worst child quadruple (one multiplicity lowered,
    star size ``k + 2d``).  The refinement over ``c`` bags and ``c`` partner
    bags intersects ``c`` child partitions per bag, so a block splits into at
    most ``U'_child^c`` pieces, for ``c * U'_child^c`` blocks in total.
    """
    if min(quad) <= 2:
        return 1, k
    n = max(quad)
    d = join_slack(n, k)
    c = induction_step_bound(n, k)
    worst_u, worst_s = 1, k
    for i in (0, 2, 3):
        child = list(quad)
        child[i] -= 1
        u, s = either_bounds(tuple(child), k + 2 * d)
        worst_u, worst_s = max(worst_u, u), max(worst_s, s)
    return sat_mul(c, sat_pow(worst_u, c)), worst_s


def phi(n: int, k: int, s: int) -> int:
    return sat(3 * n * k * (n * k * s * s) ** 2 + 1)


def star_partition_bound(quad: tuple[int, int, int, int], k: int) -> int:
    """``U = U'' phi^U''`` with ``U'' = U' phi^U'``."""
    u1, s = either_bounds(quad, k)
    n = max(quad)
    f1 = phi(n, k, s)
    u2 = sat_mul(u1, sat_pow(f1, u1))
    f2 = phi(n, k, max(s, 2 * k - 1))
    return sat_mul(u2, sat_pow(f2, u2))
