from __future__ import annotations

import random
from itertools import combinations

import networkx as nx
import pytest
from conftest import all_bipartite, cycle, random_bipartite, random_graph, to_nx
from hypothesis import given, settings
from hypothesis import strategies as st

from starpart.errors import ArgumentError, GraphParseError
from starpart.graph import (
    BipartiteGraph,
    Graph,
    LabelledPartition,
    VertexSet,
    bipartite_complement,
    complement,
    parse_bipartite,
    parse_graph6,
    read_any_graph,
    relation,
    write_bipartite,
    write_graph6,
)


def _nx_decode(text: str) -> set[tuple[int, int]]:
    h = nx.from_graph6_bytes(text.encode())
    return {tuple(sorted(e)) for e in h.edges()}


def test_graph6_smallest():
    g = parse_graph6("@")
    assert g.n == 1 and g.edge_count() == 0


def test_graph6_example_matches_reference_decoder():
    g = parse_graph6("D?{")
    assert g.n == 5
    assert set(g.edges()) == _nx_decode("D?{")


def test_graph6_roundtrip_literal():
    assert write_graph6(parse_graph6("Bw")) == "Bw"


def test_graph6_against_networkx_random(rng):
    for _ in range(100):
        n = rng.randint(0, 70)
        g = random_graph(rng, n, rng.random())
        text = write_graph6(g)
        assert text == nx.to_graph6_bytes(to_nx(g), header=False).decode().strip()
        assert set(parse_graph6(text).edges()) == _nx_decode(text)


def test_graph6_roundtrip_all_up_to_5():
    for n in range(6):
        pairs = list(combinations(range(n), 2))
        for code in range(1 << len(pairs)):
            g = Graph.from_edges(n, [pairs[e] for e in range(len(pairs)) if code >> e & 1])
            assert parse_graph6(write_graph6(g)) == g


def test_graph6_header_accepted():
    assert parse_graph6(">>graph6<<Bw") == parse_graph6("Bw")


@pytest.mark.parametrize("text", ["", "D?", "Bw!", "D?{?", "~"])
def test_graph6_errors_carry_offset(text):
    with pytest.raises(GraphParseError) as info:
        parse_graph6(text)
    assert info.value.offset is not None


def test_complement_examples():
    k3 = Graph.complete(3)
    assert complement(k3) == Graph.empty(3)
    c5 = cycle(5)
    assert nx.is_isomorphic(to_nx(complement(c5)), to_nx(c5))


def test_complement_involution_up_to_7(rng):
    for _ in range(200):
        g = random_graph(rng, rng.randint(0, 7), rng.random())
        assert complement(complement(g)) == g
        for u, v in combinations(range(g.n), 2):
            assert g.has_edge(u, v) != complement(g).has_edge(u, v)


def test_bipartite_complement_of_2k2_is_the_other_matching():
    two_k2 = BipartiteGraph.from_edges(2, 2, [(0, 0), (1, 1)])
    other = bipartite_complement(two_k2)
    # 2K2 and its bipartite complement together form the 4-cycle K_{2,2}
    assert set(other.edges()) == {(0, 1), (1, 0)}
    assert bipartite_complement(BipartiteGraph.empty(2, 2)) == BipartiteGraph.complete(2, 2)
    assert set(BipartiteGraph.complete(2, 2).edges()) == set(two_k2.edges()) | set(other.edges())


def test_bipartite_complement_involution():
    for a in range(4):
        for b in range(4):
            for g in all_bipartite(a, b):
                assert bipartite_complement(bipartite_complement(g)) == g


def test_bipartite_format_roundtrip_and_comments(rng):
    text = "# comment\nbip 2 3\n\n0 1  # edge\n1 2\n"
    b = parse_bipartite(text)
    assert (b.a_size, b.b_size) == (2, 3) and set(b.edges()) == {(0, 1), (1, 2)}
    for _ in range(30):
        g = random_bipartite(rng, rng.randint(0, 6), rng.randint(0, 6))
        assert parse_bipartite(write_bipartite(g)) == g
    assert read_any_graph(text) == b
    assert read_any_graph("Bw\n") == parse_graph6("Bw")


@pytest.mark.parametrize("text", ["bip 2\n", "bip 2 2\n0 5\n", "bip 1 1\n0\n", "0 1\n", "bip x 1\n"])
def test_bipartite_format_errors(text):
    with pytest.raises(GraphParseError):
        parse_bipartite(text)


def test_relation_examples():
    k33 = BipartiteGraph.complete(3, 3)
    top, bottom = VertexSet.of("top", range(3)), VertexSet.of("bottom", range(3))
    assert relation(k33, top, bottom, "joined")
    assert relation(k33, bottom, top, "joined")
    two_k2 = BipartiteGraph.from_edges(2, 2, [(0, 0), (1, 1)])
    assert relation(two_k2, VertexSet.of("top", [0]), VertexSet.of("bottom", [0]), "covers")
    assert not relation(two_k2, VertexSet.of("top", [0]), VertexSet.of("bottom", [1]), "covers")
    minus = BipartiteGraph.from_edges(3, 3, [(a, b) for a in range(3) for b in range(3) if (a, b) != (0, 0)])
    assert relation(minus, top, bottom, "r_covered", 2)
    assert not relation(minus, top, bottom, "r_covered", 3)


def test_relation_overlap_rejected():
    g = Graph.complete(4)
    with pytest.raises(ArgumentError):
        relation(g, VertexSet.of("general", [0, 1]), VertexSet.of("general", [1, 2]), "joined")


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 5), st.integers(0, 5), st.randoms(use_true_random=False), st.integers(1, 3))
def test_relation_symmetry_and_duality(a, b, r, rr):
    g = random_bipartite(r, a, b)
    x = VertexSet.of("top", [v for v in range(a) if r.random() < 0.6])
    y = VertexSet.of("bottom", [v for v in range(b) if r.random() < 0.6])
    comp = bipartite_complement(g)
    for kind in ("joined", "cojoined"):
        assert relation(g, x, y, kind) == relation(g, y, x, kind)
    assert relation(g, x, y, "cojoined") == relation(comp, x, y, "joined")
    assert relation(g, x, y, "r_cocovered", rr) == relation(comp, x, y, "r_covered", rr)


def test_partition_json_roundtrip_and_cover_check():
    p = LabelledPartition.from_json('{"blocks":[{"kind":"clique","vertices":[0,1]},{"kind":"independent","vertices":[2]}],'
                                    '"guarantees":[{"i":0,"j":1,"free":"nK2(2)"}]}')
    assert LabelledPartition.from_json(p.dumps()).to_json() == p.to_json()
    p.check_covers(Graph.complete(3))
    with pytest.raises(ArgumentError):
        p.check_covers(Graph.complete(4))
    with pytest.raises(GraphParseError):
        LabelledPartition.from_json('{"blocks":[{"kind":"blue","vertices":[0]}]}')
