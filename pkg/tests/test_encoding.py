from __future__ import annotations

import itertools
import warnings

import pytest
from conftest import all_bipartite, random_bipartite

from starpart.encoding import Code, backward_differences, decode, encode
from starpart.errors import ClassMembershipError, GraphParseError
from starpart.graph import BipartiteGraph


def twin_free(b: BipartiteGraph, s: int) -> bool:
    # oracle: no two top vertices each with s private neighbours
    return not any((b.rows[u] & ~b.rows[v]).bit_count() >= s and (b.rows[v] & ~b.rows[u]).bit_count() >= s
                   for u, v in itertools.combinations(range(b.a_size), 2))


def test_single_edge():
    b = BipartiteGraph.from_edges(1, 1, [(0, 0)])
    c = encode(b, 1)
    assert c.records == ((0, (0,)),)
    assert c.token_count == 2 <= c.bound == 4
    assert decode(c) == b


def test_edgeless():
    c = encode(BipartiteGraph.empty(3, 3), 1)
    assert c.records == ((0, ()), (1, ()), (2, ())) and c.token_count == 3 and c.bound == 12


def test_nested_chain_diffs():
    # N(a_i) = {0..i}: each record adds exactly one bottom vertex
    b = BipartiteGraph(4, 4, (0b0001, 0b0011, 0b0111, 0b1111))
    c = encode(b, 1)
    assert c.records == ((0, (0,)), (1, (1,)), (2, (2,)), (3, (3,)))
    assert backward_differences(c) == [0, 0, 0]
    assert c.token_count == 8


def test_complete_roundtrip_and_order():
    k33 = BipartiteGraph.complete(3, 3)
    assert decode(encode(k33, 1)) == k33
    b = BipartiteGraph(3, 3, (0b111, 0b001, 0b011))
    assert [a for a, _ in encode(b, 1).records] == [1, 2, 0]


def test_exhaustive_roundtrip_small():
    checked = 0
    for a in range(5):
        for bsz in range(5):
            for b in all_bipartite(a, bsz):
                for s in (1, 2):
                    if not twin_free(b, s):
                        with pytest.raises(ClassMembershipError):
                            encode(b, s)
                        continue
                    c = encode(b, s)
                    assert decode(c) == b
                    assert c.token_count <= c.bound
                    assert all(d < s for d in backward_differences(c))
                    checked += 1
    assert checked > 1000


def test_random_roundtrip_up_to_twelve(rng):
    for _ in range(400):
        s = rng.randint(1, 3)
        a = rng.randint(0, 8)
        b = random_bipartite(rng, a, rng.randint(0, 12 - a), rng.random())
        if not twin_free(b, s):
            continue
        c = encode(b, s)
        assert decode(Code.from_text(c.to_text())) == b
        assert all(d < s for d in backward_differences(c))


def test_witness_on_non_member():
    b = BipartiteGraph.from_edges(2, 2, [(0, 0), (1, 1)])
    with pytest.raises(ClassMembershipError) as info:
        encode(b, 1)
    w = info.value.to_json()
    assert "lambda(2,1)" in str(w) and w["witness"]["top"] == [0, 1]
    with pytest.raises(ValueError):
        encode(b, 0)


def test_wire_format():
    c = encode(BipartiteGraph(2, 3, (0b011, 0b111)), 1)
    text = c.to_text()
    assert text == "code 1 2 3\n0 : 0 1\n1 : 2\n"
    assert Code.from_text("# comment\n" + text) == c


@pytest.mark.parametrize("text", ["", "1 : 0\n", "code 1 2\n", "code x 1 1\n", "code 0 1 1\n", "code 1 1 1\n0 0\n", "code 1 1 1\na : 0\n"])
def test_wire_format_errors(text):
    with pytest.raises(GraphParseError):
        Code.from_text(text)


def test_decode_errors():
    with pytest.raises(GraphParseError):
        decode(Code(1, 1, 1, ((0, (3,)),)))
    with pytest.raises(GraphParseError):
        decode(Code(1, 2, 1, ((0, ()), (0, ()))))


def test_code_count_bound():
    # labelled 2-lambda(1)-free bipartite graphs on n vertices (all splits) never exceed (2n)^(2n)
    for n in range(1, 7):
        count = sum(1 for a in range(n + 1) for b in all_bipartite(a, n - a) if twin_free(b, 1))
        assert count <= (2 * n) ** (2 * n)


def test_no_warning_within_bound(rng):
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        for _ in range(100):
            b = random_bipartite(rng, 5, 5, rng.random())
            if twin_free(b, 2):
                encode(b, 2)
