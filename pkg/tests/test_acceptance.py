"""Acceptance gate: one test per criterion, each printing a single PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s`` (the lines are printed either way).
"""

import itertools
import random
import time
from contextlib import contextmanager

import pytest

from bitrades.construct import (
    b_s,
    lift_pair_function,
    pair_g,
    pair_g_prime,
    pair_h,
)
from bitrades.core import CellSet, Params, cartesian_product
from bitrades.search import (
    brute_force_bitrades,
    enumerate_bitrades_q3,
    enumerate_mds,
    pairwise_symdiff_spectrum,
    split_check,
)
from bitrades.verify import (
    bipartition,
    is_embedded,
    is_latin_bitrade,
    is_t_fold_mds,
    minimal_bitrade_check,
)

from oracles import latin_squares, square_cells
from test_construct import TABLE_G, TABLE_G_PRIME, TABLE_H1


@pytest.fixture
def gate(capsys):
    @contextmanager
    def run(number, label, limit):
        start = time.perf_counter()
        ok, detail = False, "raised"
        try:
            yield
            elapsed = time.perf_counter() - start
            ok = elapsed < limit
            detail = f"{elapsed:.2f}s (limit {limit}s)"
            assert ok, f"criterion {number} over time: {detail}"
        except AssertionError as exc:
            detail = str(exc).splitlines()[0] if str(exc) else detail
            raise
        finally:
            with capsys.disabled():
                print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number}: {label} :: {detail}")

    return run


def test_criterion_1_bitrade_counts(gate):
    with gate(1, "bitrade counts 4/16/256, brute force agrees", 5):
        cats = {n: {b.mask for b in enumerate_bitrades_q3(n)} for n in (1, 2, 3)}
        assert [len(cats[n]) for n in (1, 2, 3)] == [4, 16, 256]
        for n in (1, 2):
            brute = brute_force_bitrades(Params(3, n))
            assert {c.mask for c in brute.objects} == cats[n]


def test_criterion_2_minimum_and_small_spectrum(gate):
    with gate(2, "sizes >= 2^n and gaps below 2^(n+1)", 30):
        rep = brute_force_bitrades(Params(4, 2))
        sizes = set(rep.histogram) - {0}
        assert min(sizes) >= 4
        assert {s for s in sizes if 4 <= s < 8} <= {4, 6}
        q3 = {len(b) for b in enumerate_bitrades_q3(3)}
        low = {s for s in q3 if 8 <= s < 16}
        assert low <= {8, 12, 14}
        assert {len(b_s(3, s)) for s in range(3)} == {8, 12, 14}
        assert all(is_latin_bitrade(b_s(3, s)) for s in range(3))


def test_criterion_3_b_s_family(gate):
    with gate(3, "B_s bitrade, bipartite, |B_s| = 2^(n+1) - 2^(s+1)", 5):
        for n in range(1, 7):
            for s in range(n):
                b = b_s(n, s)
                assert len(b) == 2 ** (n + 1) - 2 ** (s + 1), (n, s)
                assert is_latin_bitrade(b), (n, s)
                assert bipartition(b), (n, s)


def test_criterion_4_latin_square_spectrum(gate):
    with gate(4, "576 order-4 Latin squares, no symdiff size strictly in (8,16)", 60):
        codes = list(enumerate_mds(Params(4, 3), 1))
        assert len(codes) == 576
        assert {c.mask for c in codes} == {square_cells(s).mask for s in latin_squares(4)}
        rep = pairwise_symdiff_spectrum(codes, 1)
        assert rep.count == 165_600
        inside = sorted(s for s in rep.histogram if 8 < s < 16)
        assert not inside, f"sizes strictly between 8 and 16 observed: {inside}"


def test_criterion_5_k3_embedding_spectrum(gate):
    with gate(5, "Q_3^2 code symdiff sizes are {0,4,6}", 1):
        codes = list(enumerate_mds(Params(3, 2), 1))
        assert len(codes) == 6
        rep = pairwise_symdiff_spectrum(codes, 1, include_diagonal=True)
        assert set(rep.histogram) == {0, 4, 6}
        assert {len(a ^ b) for a, b in itertools.product(codes, repeat=2)} == {0, 4, 6}


def test_criterion_6_pair_function_lifts(gate):
    with gate(6, "lifts are 2-fold, tables match, lifted symdiffs embed", 5):
        assert pair_g(2).matrix() == TABLE_G
        assert pair_g_prime(2).matrix() == TABLE_G_PRIME
        assert pair_h(2, 1).matrix() == TABLE_H1
        for n in (2, 3):
            gp = lift_pair_function(pair_g_prime(n))
            assert is_t_fold_mds(lift_pair_function(pair_g(n)), 2)
            assert is_t_fold_mds(gp, 2)
            for s in range(1, n + 1):
                h = lift_pair_function(pair_h(n, s))
                assert is_t_fold_mds(h, 2), (n, s)
                b = gp ^ h
                assert len(b) == 2 ** (n + 2) - 2 ** (s + 1), (n, s)
                assert is_latin_bitrade(b) and bipartition(b), (n, s)
                assert is_embedded(b, h, 2), (n, s)


def _check_decomposition(w, cert):
    parts = cert["decomposition"]
    assert len(parts) == 2
    assert all(is_t_fold_mds(p, 1) for p in parts)
    assert not (parts[0] & parts[1]) and (parts[0] | parts[1]) == w


def test_criterion_7_splittability(gate):
    with gate(7, "g splits, h_1 does not (n = 2, 3)", 120):
        for n in (2, 3):
            wg = lift_pair_function(pair_g(n))
            cert = split_check(wg, 2)
            assert cert, n
            _check_decomposition(wg, cert)
            cert = split_check(lift_pair_function(pair_h(n, 1)), 2)
            assert not cert and cert.kind == "exhaustion-summary", n


def test_criterion_8_minimal_equivalence(gate):
    with gate(8, "the four minimality flags agree on both catalogs", 10):
        seen = 0
        for n in (2, 3):
            for b in enumerate_bitrades_q3(n):
                if b:
                    flags = minimal_bitrade_check(b).flags
                    assert len(set(flags)) == 1, (sorted(b.ranks()), flags)
                    seen += 1
        assert seen == 15 + 255


def test_criterion_9_closure(gate):
    with gate(9, "1000 symdiff pairs and 1000 product pairs close", 30):
        rng = random.Random(20240601)
        small = list(enumerate_bitrades_q3(2))
        big = list(enumerate_bitrades_q3(3))
        bip_small = {b.mask: bool(bipartition(b)) for b in small}
        bip_big = {b.mask: bool(bipartition(b)) for b in big}
        for _ in range(1000):
            a, b = rng.choice(big), rng.choice(big)
            assert is_latin_bitrade(a ^ b)
        for _ in range(1000):
            a, b = rng.choice(small), rng.choice(big)
            p = cartesian_product(a, b)
            assert isinstance(p, CellSet) and len(p) == len(a) * len(b)
            assert is_latin_bitrade(p)
            if bip_small[a.mask] and bip_big[b.mask]:
                assert bipartition(p)
