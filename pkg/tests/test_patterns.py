from __future__ import annotations

from itertools import product

import networkx as nx
import pytest
from conftest import cycle, path, random_bipartite, random_graph, to_nx
from networkx.algorithms.isomorphism import GraphMatcher

from starpart.errors import ArgumentError
from starpart.graph import BipartiteGraph, Graph, complement
from starpart.patterns import (
    PatternSpec,
    build_pattern,
    detect_bipartite,
    family_F,
    find_induced,
    find_induced_bipartite,
    is_twin_star_free,
    parse_pattern,
    parse_pattern_list,
)


def nx_induced(host: Graph, pattern: Graph) -> bool:
    """Independent oracle: networkx VF2 induced subgraph isomorphism."""
    return GraphMatcher(to_nx(host), to_nx(pattern)).subgraph_is_isomorphic()


def bip_nx(b: BipartiteGraph) -> nx.Graph:
    h = nx.Graph()
    h.add_nodes_from((("a", i), {"side": 0}) for i in range(b.a_size))
    h.add_nodes_from((("b", j), {"side": 1}) for j in range(b.b_size))
    h.add_edges_from((("a", i), ("b", j)) for i, j in b.edges())
    return h


def nx_induced_bipartite(host: BipartiteGraph, pattern: BipartiteGraph) -> bool:
    # induced on the union of both sides; same-side pairs are non-edges in both graphs
    gm = GraphMatcher(bip_nx(host), bip_nx(pattern), node_match=lambda x, y: x["side"] == y["side"])
    return gm.subgraph_is_isomorphic()


def check_embedding(host: Graph, pattern: Graph, mapping) -> None:
    assert len(set(mapping)) == len(mapping)
    for u in range(pattern.n):
        for v in range(u + 1, pattern.n):
            assert host.has_edge(mapping[u], mapping[v]) == pattern.has_edge(u, v)


def check_bip_embedding(host: BipartiteGraph, pattern: BipartiteGraph, emb) -> None:
    assert len(emb.top) == pattern.a_size and len(emb.bottom) == pattern.b_size
    assert len(set(emb.top)) == len(emb.top) and len(set(emb.bottom)) == len(emb.bottom)
    for i, j in product(range(pattern.a_size), range(pattern.b_size)):
        assert host.has_edge(emb.top[i], emb.bottom[j]) == pattern.has_edge(i, j)


def test_build_small_patterns():
    assert build_pattern(PatternSpec("G1", 1, 1)) == Graph.complete(2)
    g2 = build_pattern(PatternSpec("G2", 4, 3))
    assert g2.n == 16 and g2.edge_count() == 4 * 3 + 6
    centres = [0, 4, 8, 12]
    assert g2.is_clique(sum(1 << c for c in centres))
    h1 = build_pattern(PatternSpec("H1", 2, 1))
    assert nx.is_isomorphic(to_nx(h1), nx.cycle_graph(4))


@pytest.mark.parametrize("family", ["G1", "G2", "G3", "G4"])
def test_h_is_complement_of_g(family):
    g = build_pattern(PatternSpec(family, 2, 2))
    h = build_pattern(PatternSpec("H" + family[1], 2, 2))
    assert complement(g) == h


def test_family_shapes_against_networkx():
    star2 = nx.disjoint_union(nx.star_graph(2), nx.star_graph(2))
    assert nx.is_isomorphic(to_nx(build_pattern(PatternSpec("G1", 2, 2))), star2)
    assert nx.is_isomorphic(to_nx(build_pattern(PatternSpec("nKl", 3, 3))), nx.disjoint_union_all([nx.complete_graph(3)] * 3))
    assert nx.is_isomorphic(to_nx(build_pattern(PatternSpec("nK2", 2))), nx.disjoint_union(nx.complete_graph(2), nx.complete_graph(2)))


def test_find_induced_examples():
    two_k2 = PatternSpec("nK2", 2)
    assert find_induced(path(4), two_k2) is None
    host = build_pattern(two_k2)
    emb = find_induced(host, two_k2)
    assert emb is not None
    check_embedding(host, host, emb.mapping)
    emb = find_induced(cycle(6), two_k2)
    assert emb is not None
    check_embedding(cycle(6), host, emb.mapping)


def test_find_induced_matches_networkx(rng):
    specs = family_F(2, 1) + family_F(2, 2) + [PatternSpec("nKl", 2, 3), PatternSpec("co_nKl", 2, 2), PatternSpec("nK2", 3)]
    for _ in range(60):
        host = random_graph(rng, rng.randint(4, 9), rng.random())
        for spec in specs:
            pattern = build_pattern(spec)
            emb = find_induced(host, spec)
            assert (emb is not None) == nx_induced(host, pattern), spec
            if emb is not None:
                check_embedding(host, pattern, emb.mapping)


def test_complement_duality(rng):
    for _ in range(60):
        host = random_graph(rng, rng.randint(0, 7), rng.random())
        for spec in family_F(2, 1) + [PatternSpec("nK2", 2), PatternSpec("nKl", 2, 2)]:
            assert (find_induced(host, spec) is None) == (find_induced(complement(host), spec.complemented()) is None)


def test_monotone_in_multiplicity(rng):
    for _ in range(40):
        host = random_graph(rng, 9, rng.random())
        for fam in ("G1", "G4", "H2"):
            for n in (2, 3):
                if find_induced(host, PatternSpec(fam, n, 1)) is not None:
                    assert find_induced(host, PatternSpec(fam, n - 1, 1)) is not None


def test_bipartite_orientation():
    lam2 = build_pattern(PatternSpec("bip_lambda", 1, 2))
    up2 = lam2.swap_sides()
    assert find_induced_bipartite(up2, PatternSpec("bip_lambda", 1, 2)) is None
    assert find_induced_bipartite(lam2, PatternSpec("bip_lambda", 1, 2)) is not None
    assert find_induced_bipartite(up2, PatternSpec("bip_up", 1, 2)) is not None


def test_bipartite_c6_contains_comatching():
    c6 = BipartiteGraph.from_edges(3, 3, [(i, i) for i in range(3)] + [(i, (i + 1) % 3) for i in range(3)])
    spec = PatternSpec("bip_comatching", 3)
    assert find_induced_bipartite(c6, spec) is not None
    assert detect_bipartite(c6, spec) is not None


def test_k22_has_no_two_lambda_one():
    assert find_induced_bipartite(BipartiteGraph.complete(2, 2), PatternSpec("bip_lambda", 2, 1)) is None


def test_non_bipartite_spec_rejected():
    with pytest.raises(ArgumentError):
        find_induced_bipartite(BipartiteGraph.complete(2, 2), PatternSpec("nK2", 2))


def test_twin_star_examples():
    two_k2 = BipartiteGraph.from_edges(2, 2, [(0, 0), (1, 1)])
    assert not is_twin_star_free(two_k2, 1, "lambda")
    for s in (1, 2, 4):
        assert is_twin_star_free(BipartiteGraph.complete(4, 4), s, "lambda")
    stars = build_pattern(PatternSpec("bip_lambda", 2, 2))
    assert not is_twin_star_free(stars, 2, "lambda")
    assert is_twin_star_free(stars, 3, "lambda")


def test_fast_detector_agrees_with_networkx(rng):
    specs = [PatternSpec(f, n, k) for f in ("bip_lambda", "bip_up", "bip_co_lambda", "bip_co_up") for n in (1, 2, 3) for k in (1, 2)]
    specs += [PatternSpec(f, n) for f in ("bip_matching", "bip_comatching") for n in (2, 3)]
    for _ in range(120):
        host = random_bipartite(rng, rng.randint(0, 6), rng.randint(0, 6), rng.random())
        for spec in specs:
            pattern = build_pattern(spec)
            fast = detect_bipartite(host, spec)
            generic = find_induced_bipartite(host, spec)
            expect = nx_induced_bipartite(host, pattern)
            assert (fast is not None) == (generic is not None) == expect, spec
            for emb in (fast, generic):
                if emb is not None:
                    check_bip_embedding(host, pattern, emb)


def test_twin_star_pairwise_criterion_exhaustive():
    # every bipartite graph with |A| <= 3, |B| <= 4; agreement with the generic search
    for a in range(4):
        for b in range(5):
            for rows in product(range(1 << b), repeat=a):
                host = BipartiteGraph(a, b, rows)
                for s in (1, 2, 3):
                    for orient, fam in (("lambda", "bip_lambda"), ("up", "bip_up")):
                        assert is_twin_star_free(host, s, orient) == (find_induced_bipartite(host, PatternSpec(fam, 2, s)) is None)


@pytest.mark.parametrize("name,expect", [
    ("G2(4,3)", PatternSpec("G2", 4, 3)),
    ("co-lambda(2,1)", PatternSpec("bip_co_lambda", 2, 1)),
    ("nK2(3)", PatternSpec("nK2", 3)),
    ("co-nKl(2,4)", PatternSpec("co_nKl", 2, 4)),
    ("2K2", PatternSpec("nK2", 2)),
    ("3K3", PatternSpec("nKl", 3, 3)),
    ("C4", PatternSpec("co_nK2", 2)),
])
def test_parse_pattern(name, expect):
    assert parse_pattern(name) == expect
    assert parse_pattern(expect.name, bipartite=expect.bipartite) == expect


def test_parse_pattern_bipartite_names():
    assert parse_pattern("2K2", bipartite=True) == PatternSpec("bip_matching", 2)
    assert parse_pattern("C6", bipartite=True) == PatternSpec("bip_comatching", 3)
    assert parse_pattern_list("lambda(2,1)+up(2,1)") == [PatternSpec("bip_lambda", 2, 1), PatternSpec("bip_up", 2, 1)]
    assert parse_pattern_list("G1(2,1), H1(2,1) ;nKl(2,3)") == [PatternSpec("G1", 2, 1), PatternSpec("H1", 2, 1), PatternSpec("nKl", 2, 3)]


@pytest.mark.parametrize("bad", ["X(1)", "G1(2)", "nK2(2,3)", "lambda(0,1)", ""])
def test_parse_pattern_errors(bad):
    with pytest.raises(ArgumentError):
        parse_pattern(bad)
