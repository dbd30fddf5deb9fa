import itertools
import json
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bitrades.construct import b_s
from bitrades.core import (
    CellSet,
    Params,
    ValidationError,
    cartesian_product,
    faces,
    hamming_distance,
    induced_adjacency,
    intersect,
    line_cells,
    line_masks,
    lines,
    rank,
    symdiff,
    union,
    unrank,
)
from bitrades.verify import is_latin_bitrade

Q32 = Params(3, 2)


def test_rank_examples():
    assert rank((0, 0), Q32) == 0
    assert rank((1, 2), Q32) == 1 + 2 * 3
    for p in itertools.product(range(3), repeat=2):
        assert unrank(rank(p, Q32), Q32) == p


@pytest.mark.parametrize("k,n", [(k, n) for k in range(2, 9) for n in range(1, 13) if k**n <= 2**12])
def test_rank_bijection_exhaustive(k, n):
    params = Params(k, n)
    seen = [unrank(i, params) for i in range(params.size)]
    assert len(set(seen)) == params.size
    assert all(rank(p, params) == i for i, p in enumerate(seen))


def test_rank_rejects_bad_input():
    with pytest.raises(ValidationError):
        rank((0, 3), Q32)
    with pytest.raises(ValidationError):
        rank((0,), Q32)
    with pytest.raises(ValidationError):
        unrank(9, Q32)


def test_params_cap():
    with pytest.raises(ValidationError):
        Params(2, 23)
    assert Params(2, 23, cap=1 << 23).size == 1 << 23
    with pytest.raises(ValidationError):
        Params(1, 3)
    with pytest.raises(ValidationError):
        Params(3, 0)


def test_hamming_distance():
    assert hamming_distance((0, 1, 2), (0, 1, 2)) == 0
    assert hamming_distance((0, 1, 2), (0, 2, 2)) == 1
    assert hamming_distance((0, 0), (1, 2)) == 2
    with pytest.raises(ValidationError):
        hamming_distance((0, 1), (0, 1, 2))


def test_line_counts_and_cells():
    assert len(list(lines(Q32))) == 6
    assert len(list(lines(Params(4, 3)))) == 48
    first = next(l for l in lines(Q32) if l.direction == 0 and l.base == (2,))
    assert set(line_cells(first)) == {(0, 2), (1, 2), (2, 2)}


@pytest.mark.parametrize("k,n", [(2, 1), (2, 4), (3, 1), (3, 3), (4, 3), (5, 2)])
def test_every_point_on_n_lines(k, n):
    params = Params(k, n)
    ls = list(lines(params))
    assert len(ls) == n * k ** (n - 1)
    assert len({(l.direction, l.base) for l in ls}) == len(ls)
    cover = [0] * params.size
    for l in ls:
        cells = l.cells()
        assert len(cells) == k
        for p in cells:
            cover[rank(p, params)] += 1
    assert cover == [n] * params.size
    assert [l.mask for l in ls] == list(line_masks(params))


def test_lines_order_direction_major():
    ls = list(lines(Q32))
    assert [l.direction for l in ls] == [0, 0, 0, 1, 1, 1]
    assert [l.base for l in ls] == [(0,), (1,), (2,)] * 2


def test_symdiff_examples():
    s = CellSet.from_points(Q32, [(0, 0), (1, 2)])
    empty = CellSet(Q32)
    assert not symdiff(s, s)
    assert symdiff(s, empty) == s
    other = CellSet.from_points(Q32, [(0, 0), (1, 1)])
    assert set(symdiff(s, other)) == {(1, 2), (1, 1)}
    assert set(union(s, other)) == {(0, 0), (1, 1), (1, 2)}
    assert set(intersect(s, other)) == {(0, 0)}
    with pytest.raises(ValidationError):
        symdiff(s, CellSet(Params(3, 3)))


masks = st.integers(min_value=0, max_value=(1 << 27) - 1)
Q33 = Params(3, 3)


@given(masks, masks, masks)
def test_set_algebra_laws(x, y, z):
    a, b, c = CellSet(Q33, x), CellSet(Q33, y), CellSet(Q33, z)
    assert (a ^ b) ^ c == a ^ (b ^ c)
    assert a ^ b == b ^ a
    assert (a ^ b) ^ b == a
    assert len(a ^ b) == len(a) + len(b) - 2 * len(a & b)
    # brute-force the same laws on Python sets of points
    sa, sb = set(a), set(b)
    assert set(a ^ b) == sa ^ sb
    assert set(a & b) == sa & sb


def test_iteration_is_rank_ascending():
    s = CellSet.from_points(Q32, [(2, 2), (0, 1), (1, 0)])
    pts = list(s)
    assert [rank(p, Q32) for p in pts] == sorted(rank(p, Q32) for p in pts)


def test_cartesian_product_examples():
    q31 = Params(3, 1)
    a = CellSet.from_points(q31, [(0,), (1,)])
    prod = cartesian_product(a, a)
    assert set(prod) == {(0, 0), (0, 1), (1, 0), (1, 1)}
    assert len(prod) == 4
    assert not cartesian_product(a, CellSet(q31))
    big = cartesian_product(b_s(2, 0), a)
    assert big.params == Params(3, 3) and len(big) == 12
    assert is_latin_bitrade(big)
    with pytest.raises(ValidationError):
        cartesian_product(a, CellSet(Params(4, 1)))


@given(st.integers(0, 511), st.integers(0, 511), st.integers(0, 7))
def test_product_distributes_over_symdiff(x, y, z):
    a, b = CellSet(Q32, x), CellSet(Q32, y)
    c = CellSet(Params(3, 1), z)
    assert cartesian_product(a ^ b, c) == cartesian_product(a, c) ^ cartesian_product(b, c)
    expected = {p + q for p in a for q in c}
    assert set(cartesian_product(a, c)) == expected


def test_induced_adjacency_examples():
    sq = CellSet.from_points(Q32, [(0, 0), (0, 1), (1, 0), (1, 1)])
    g = induced_adjacency(sq)
    assert len(g.edges) == 4 and all(g.degree(v) == 2 for v in g.vertices)
    assert not induced_adjacency(CellSet.from_points(Q32, [(1, 1)])).edges
    hexa = induced_adjacency(b_s(2, 0))
    assert len(hexa.vertices) == 6 and len(hexa.edges) == 6
    assert all(hexa.degree(v) == 2 for v in hexa.vertices)
    # connected and 2-regular on 6 vertices: a single 6-cycle
    seen, stack = {hexa.vertices[0]}, [hexa.vertices[0]]
    while stack:
        for v in hexa.adjacency[stack.pop()]:
            if v not in seen:
                seen.add(v)
                stack.append(v)
    assert len(seen) == 6


@settings(max_examples=60)
@given(masks)
def test_induced_adjacency_matches_quadratic_scan(x):
    s = CellSet(Q33, x)
    pts = list(s)
    expected = sum(hamming_distance(p, q) == 1 for p, q in itertools.combinations(pts, 2))
    assert len(induced_adjacency(s).edges) == expected


def test_faces():
    whole = list(faces(Q32, 2))
    assert len(whole) == 1 and len(whole[0].cells()) == 9
    ones = list(faces(Q32, 1))
    assert [f.mask for f in ones] == [l.mask for l in lines(Q32)]
    assert len(list(faces(Q32, 0))) == 9
    for k, n in [(3, 3), (4, 3), (2, 4)]:
        params = Params(k, n)
        for m in range(n + 1):
            fs = list(faces(params, m))
            assert len(fs) == math.comb(n, m) * k ** (n - m)
            assert all(len(f.cells()) == k**m for f in fs)
    with pytest.raises(ValidationError):
        list(faces(Q32, 3))


def test_n_equals_one_and_k_two():
    params = Params(3, 1)
    assert len(list(lines(params))) == 1
    assert list(lines(params))[0].cells() == [(0,), (1,), (2,)]
    assert len(list(lines(Params(2, 3)))) == 12


def test_cellset_json_roundtrip():
    s = b_s(2, 0)
    doc = json.loads(s.dumps())
    assert doc["k"] == 3 and doc["n"] == 2
    assert doc["cells"] == [[0, 0], [1, 0], [0, 1], [2, 1], [1, 2], [2, 2]]
    assert CellSet.from_json(doc) == s
    with pytest.raises(ValidationError):
        CellSet.from_json({"k": 3, "cells": []})
    with pytest.raises(ValidationError):
        CellSet.from_json({"k": 3, "n": 2, "cells": [[0, 3]]})
