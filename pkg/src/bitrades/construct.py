"""Explicit families: Moebius bitrades in Q_3^n, the B_s family, the ternary
parity code, quasigroup graphs and pair functions over Q_4^n with their lifts.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Callable, Sequence

from .core import (
    CellSet,
    Params,
    Point,
    ValidationError,
    cartesian_product,
    line_masks,
    rank,
    unrank,
)


@dataclass(frozen=True, order=True)
class Pair:
    """A two-element subset ``{lo, hi}`` of Q_4."""

    lo: int
    hi: int

    def __post_init__(self) -> None:
        if not 0 <= self.lo < self.hi <= 3:
            raise ValidationError(f"not a two-element subset of Q_4: ({self.lo}, {self.hi})")

    @property
    def complement(self) -> Pair:
        return Pair(*sorted({0, 1, 2, 3} - {self.lo, self.hi}))

    def __iter__(self):
        return iter((self.lo, self.hi))

    def __str__(self) -> str:
        return f"{self.lo}{self.hi}"

    @classmethod
    def parse(cls, text: str) -> Pair:
        if len(text) != 2 or not text.isdigit():
            raise ValidationError(f"bad pair string {text!r}")
        a, b = sorted(int(c) for c in text)
        return cls(a, b)


PAIRS = tuple(Pair(a, b) for a, b in itertools.combinations(range(4), 2))
ALPHA = Pair(0, 2)
BETA = Pair(1, 2)

_Q4 = {n: Params(4, n) for n in range(1, 12)}


def _q4(n: int) -> Params:
    if n not in _Q4:
        raise ValidationError(f"unsupported dimension {n}")
    return _Q4[n]


@dataclass(frozen=True)
class PairFunction:
    """A total map ``Q_4^n -> PAIRS`` stored in rank order."""

    n: int
    values: tuple[Pair, ...]

    def __post_init__(self) -> None:
        if len(self.values) != 4**self.n:
            raise ValidationError(f"table has {len(self.values)} entries, expected {4 ** self.n}")

    def __call__(self, *point: int) -> Pair:
        if len(point) == 1 and isinstance(point[0], (tuple, list)):
            point = tuple(point[0])
        return self.values[rank(point, _q4(self.n))]

    def matrix(self) -> list[list[Pair]]:
        """Rows indexed by the first coordinate; only meaningful for n = 2."""
        if self.n != 2:
            raise ValidationError("matrix view needs n = 2")
        return [[self(a, b) for b in range(4)] for a in range(4)]

    def to_json(self) -> dict:
        return {"n": self.n, "values": [str(v) for v in self.values]}

    @classmethod
    def from_json(cls, doc: dict) -> PairFunction:
        try:
            return cls(int(doc["n"]), tuple(Pair.parse(v) for v in doc["values"]))
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"not a PairFunction document: {exc}") from None

    def dumps(self) -> str:
        return json.dumps(self.to_json(), separators=(",", ":"))


def upset_mask(x: Sequence[int], params: Params) -> int:
    """Cells ``y`` of Q_3^n with ``x <= y`` in the order 0 < 2, 1 < 2."""
    m = 0
    for choice in itertools.product((False, True), repeat=len(x)):
        y = tuple(2 if up else c for c, up in zip(x, choice))
        m |= 1 << rank(y, params)
    return m


def boolean_subcube(n: int) -> CellSet:
    return CellSet.from_points(Params(3, n), itertools.product((0, 1), repeat=n))


def moebius_bitrade(a: CellSet) -> CellSet:
    """The bitrade of Q_3^n whose trace on ``{0,1}^n`` is ``a``.

    ``f(y)`` is the parity of the members of ``a`` below ``y``; XOR-ing the
    up-set of each member computes all of them at once.
    """
    if a.params.k != 3:
        raise ValidationError("Moebius bitrades live in Q_3^n")
    m = 0
    for x in a:
        if any(c == 2 for c in x):
            raise ValidationError(f"{x} is not in {{0,1}}^n")
        m ^= upset_mask(x, a.params)
    return CellSet(a.params, m)


def moebius_value(a: CellSet, y: Sequence[int]) -> int:
    """Pointwise parity of the members of ``a`` lying below ``y``."""
    return sum(
        all(xi == yi or yi == 2 for xi, yi in zip(x, y)) for x in a
    ) & 1


def b_s(n: int, s: int, tail: tuple[int, int] = (0, 1)) -> CellSet:
    """``({0,1}^(n-s) ^ {1,2}^(n-s)) x {0,1}^s`` inside Q_3^n.

    ``tail`` replaces the symbols of the trailing ``{0,1}^s`` factor.
    """
    if not 0 <= s <= n - 1:
        raise ValidationError(f"s={s} outside [0, {n - 1}]")
    params = Params(3, n)
    m = 0
    for r in range(params.size):
        p = unrank(r, params)
        head, rest = p[: n - s], p[n - s :]
        low = all(c in (0, 1) for c in head)
        high = all(c in (1, 2) for c in head)
        if low != high and all(c in tail for c in rest):
            m |= 1 << r
    return CellSet(params, m)


def b_s_product(n: int, s: int) -> CellSet:
    """Same set as :func:`b_s`, assembled from the product and symdiff operations."""
    if not 0 <= s <= n - 1:
        raise ValidationError(f"s={s} outside [0, {n - 1}]")
    head = Params(3, n - s)
    low = CellSet.from_points(head, itertools.product((0, 1), repeat=n - s))
    high = CellSet.from_points(head, itertools.product((1, 2), repeat=n - s))
    if s == 0:
        return low ^ high
    return cartesian_product(low ^ high, boolean_subcube(s))


def linear_mds_q3(n: int) -> CellSet:
    params = Params(3, n)
    m = 0
    for r in range(params.size):
        if sum(unrank(r, params)) % 3 == 0:
            m |= 1 << r
    return CellSet(params, m)


def quasigroup_graph(
    f: Callable[[Point], int] | Sequence[int], k: int, n: int
) -> CellSet:
    """``{(x, f(x))}`` in Q_k^(n+1); ``f`` is a callable or a table in rank order."""
    params = Params(k, n)
    out = Params(k, n + 1)
    table = f if not callable(f) else [f(unrank(r, params)) for r in range(params.size)]
    if len(table) != params.size:
        raise ValidationError(f"table has {len(table)} entries, expected {params.size}")
    m = 0
    for r, v in enumerate(table):
        if not 0 <= v < k:
            raise ValidationError(f"value {v} outside [0, {k})")
        m |= 1 << (r + v * params.size)
    return CellSet(out, m)


def pair_g(n: int) -> PairFunction:
    params = _q4(n)
    return PairFunction(
        n,
        tuple(
            ALPHA if sum(unrank(r, params)) % 2 == 0 else ALPHA.complement
            for r in range(params.size)
        ),
    )


def _in_12_cube(p: Point) -> bool:
    return all(c in (1, 2) for c in p)


def pair_g_prime(n: int) -> PairFunction:
    """``pair_g`` with the value complemented exactly on ``{1,2}^n``."""
    params = _q4(n)
    g = pair_g(n)
    return PairFunction(
        n,
        tuple(
            v.complement if _in_12_cube(unrank(r, params)) else v
            for r, v in enumerate(g.values)
        ),
    )


def modification_set(n: int, s: int) -> CellSet:
    """Cells of Q_4^n where ``pair_h(n, s)`` departs from ``pair_g_prime(n)``.

    This is ``b_s(n, s - 1)`` with its ``{0,1}^(s-1)`` factor moved to the
    symbols {1,2}, read inside Q_4^n.  With the factor left on {0,1} the lift
    is not 2-fold for s >= 2.
    """
    if not 1 <= s <= n:
        raise ValidationError(f"s={s} outside [1, {n}]")
    return CellSet.from_points(_q4(n), b_s(n, s - 1, tail=(1, 2)))


def pair_h(n: int, s: int) -> PairFunction:
    """``pair_g_prime`` with alpha -> beta and its complement -> beta's complement on the modification set."""
    mod = modification_set(n, s)
    gp = pair_g_prime(n)
    swap = {ALPHA: BETA, ALPHA.complement: BETA.complement}
    return PairFunction(
        n,
        tuple(swap[v] if mod.mask >> r & 1 else v for r, v in enumerate(gp.values)),
    )


def lift_pair_function(g: PairFunction) -> CellSet:
    """``{(a, x) : x in g(a)}`` in Q_4^(n+1)."""
    stride = 4**g.n
    m = 0
    for r, v in enumerate(g.values):
        m |= 1 << (r + v.lo * stride) | 1 << (r + v.hi * stride)
    return CellSet(_q4(g.n + 1), m)


def pair_balanced(g: PairFunction) -> bool:
    """On every line of Q_4^n, each pair and its complement occur equally often."""
    params = _q4(g.n)
    for lm in line_masks(params):
        counts = dict.fromkeys(PAIRS, 0)
        while lm:
            low = lm & -lm
            counts[g.values[low.bit_length() - 1]] += 1
            lm ^= low
        if any(counts[c] != counts[c.complement] for c in PAIRS):
            return False
    return True
