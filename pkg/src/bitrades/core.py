"""Points, lines, faces and cell sets of the k-ary n-dimensional hypercube.

A point of ``Q_k^n`` is a plain tuple of ``n`` ints in ``[0, k)``.  Points are
ranked in mixed radix with coordinate 0 least significant, and a
:class:`CellSet` stores its members as a Python int bitmask over those ranks,
so set algebra is a single bitwise operation and a line count is
``(mask & line_mask).bit_count()``.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

Point = tuple[int, ...]

DEFAULT_CELL_CAP = 1 << 22


class ValidationError(ValueError):
    """Raised for malformed points, mismatched spaces and bad arguments."""


@dataclass(frozen=True)
class Params:
    """The ambient space ``Q_k^n``."""

    k: int
    n: int
    cap: int = field(default=DEFAULT_CELL_CAP, compare=False, repr=False)

    def __post_init__(self) -> None:
        if not isinstance(self.k, int) or self.k < 2:
            raise ValidationError(f"alphabet size must be an integer >= 2, got {self.k!r}")
        if not isinstance(self.n, int) or self.n < 1:
            raise ValidationError(f"dimension must be an integer >= 1, got {self.n!r}")
        if self.k**self.n > self.cap:
            raise ValidationError(
                f"Q_{self.k}^{self.n} has {self.k ** self.n} cells, above the cap of {self.cap}"
            )

    @property
    def size(self) -> int:
        return self.k**self.n

    @property
    def full_mask(self) -> int:
        return (1 << self.size) - 1

    def with_dim(self, n: int) -> Params:
        return Params(self.k, n, self.cap)


def check_point(p: Sequence[int], params: Params) -> Point:
    p = tuple(p)
    if len(p) != params.n:
        raise ValidationError(f"point {p} has length {len(p)}, expected {params.n}")
    for c in p:
        if not isinstance(c, int) or not 0 <= c < params.k:
            raise ValidationError(f"coordinate {c!r} of {p} is outside [0, {params.k})")
    return p


def rank(p: Sequence[int], params: Params) -> int:
    p = check_point(p, params)
    r = 0
    for c in reversed(p):
        r = r * params.k + c
    return r


def unrank(i: int, params: Params) -> Point:
    if not 0 <= i < params.size:
        raise ValidationError(f"rank {i} is outside [0, {params.size})")
    coords = []
    for _ in range(params.n):
        i, c = divmod(i, params.k)
        coords.append(c)
    return tuple(coords)


def hamming_distance(x: Sequence[int], y: Sequence[int]) -> int:
    if len(x) != len(y):
        raise ValidationError(f"dimension mismatch: {len(x)} vs {len(y)}")
    return sum(a != b for a, b in zip(x, y))


@dataclass(frozen=True)
class Line:
    """A one-dimensional face: ``direction`` varies, ``base`` holds the other n-1 coordinates."""

    params: Params
    direction: int
    base: Point

    def __post_init__(self) -> None:
        if not 0 <= self.direction < self.params.n:
            raise ValidationError(f"direction {self.direction} outside [0, {self.params.n})")
        if len(self.base) != self.params.n - 1 or any(
            not 0 <= c < self.params.k for c in self.base
        ):
            raise ValidationError(f"bad line base {self.base} for {self.params}")

    def point(self, value: int) -> Point:
        b = self.base
        return b[: self.direction] + (value,) + b[self.direction :]

    def cells(self) -> list[Point]:
        return [self.point(v) for v in range(self.params.k)]

    @property
    def mask(self) -> int:
        m = 0
        for p in self.cells():
            m |= 1 << rank(p, self.params)
        return m

    def to_json(self) -> dict:
        return {"direction": self.direction, "base": list(self.base)}


def lines(params: Params) -> Iterator[Line]:
    """Every line of ``Q_k^n``, direction-major then by rank of the base."""
    for d in range(params.n):
        for i in range(params.k ** (params.n - 1)):
            base = []
            for _ in range(params.n - 1):
                i, c = divmod(i, params.k)
                base.append(c)
            yield Line(params, d, tuple(base))


def line_cells(line: Line) -> list[Point]:
    return line.cells()


@lru_cache(maxsize=64)
def _line_masks(k: int, n: int) -> tuple[int, ...]:
    params = Params(k, n, cap=k**n)
    return tuple(l.mask for l in lines(params))


def line_masks(params: Params) -> tuple[int, ...]:
    """Bitmasks of :func:`lines` in the same order."""
    return _line_masks(params.k, params.n)


def line_at(params: Params, index: int) -> Line:
    per_dir = params.k ** (params.n - 1)
    d, i = divmod(index, per_dir)
    base = []
    for _ in range(params.n - 1):
        i, c = divmod(i, params.k)
        base.append(c)
    return Line(params, d, tuple(base))


@dataclass(frozen=True)
class Face:
    """An m-dimensional face: ``free`` positions vary, the rest are pinned to ``fixed``."""

    params: Params
    free: tuple[int, ...]
    fixed: tuple[int, ...]

    @property
    def dim(self) -> int:
        return len(self.free)

    def cells(self) -> list[Point]:
        pinned = [i for i in range(self.params.n) if i not in self.free]
        out = []
        for values in itertools.product(range(self.params.k), repeat=len(self.free)):
            p = [0] * self.params.n
            for i, v in zip(pinned, self.fixed):
                p[i] = v
            for i, v in zip(self.free, values):
                p[i] = v
            out.append(tuple(p))
        out.sort(key=lambda q: rank(q, self.params))
        return out

    @property
    def mask(self) -> int:
        m = 0
        for p in self.cells():
            m |= 1 << rank(p, self.params)
        return m


def faces(params: Params, m: int) -> Iterator[Face]:
    """All ``C(n, m) * k^(n-m)`` faces of dimension ``m``."""
    if not 0 <= m <= params.n:
        raise ValidationError(f"face dimension {m} outside [0, {params.n}]")
    for free in itertools.combinations(range(params.n), m):
        for i in range(params.k ** (params.n - m)):
            fixed = []
            for _ in range(params.n - m):
                i, c = divmod(i, params.k)
                fixed.append(c)
            yield Face(params, free, tuple(fixed))


@dataclass(frozen=True)
class CellSet:
    """An immutable subset of ``Q_k^n`` stored as a rank bitmask."""

    params: Params
    mask: int = 0

    def __post_init__(self) -> None:
        if self.mask < 0 or self.mask >> self.params.size:
            raise ValidationError("mask has bits outside the space")

    @classmethod
    def from_points(cls, params: Params, points: Iterable[Sequence[int]]) -> CellSet:
        m = 0
        for p in points:
            m |= 1 << rank(p, params)
        return cls(params, m)

    @classmethod
    def from_ranks(cls, params: Params, ranks: Iterable[int]) -> CellSet:
        m = 0
        for r in ranks:
            if not 0 <= r < params.size:
                raise ValidationError(f"rank {r} is outside [0, {params.size})")
            m |= 1 << r
        return cls(params, m)

    @classmethod
    def full(cls, params: Params) -> CellSet:
        return cls(params, params.full_mask)

    def __len__(self) -> int:
        return self.mask.bit_count()

    def __bool__(self) -> bool:
        return self.mask != 0

    def ranks(self) -> Iterator[int]:
        m = self.mask
        while m:
            low = m & -m
            yield low.bit_length() - 1
            m ^= low

    def __iter__(self) -> Iterator[Point]:
        for r in self.ranks():
            yield unrank(r, self.params)

    def __contains__(self, p: object) -> bool:
        try:
            r = rank(p, self.params)  # type: ignore[arg-type]
        except (ValidationError, TypeError):
            return False
        return bool(self.mask >> r & 1)

    def _same_space(self, other: CellSet) -> None:
        if not isinstance(other, CellSet):
            raise ValidationError(f"expected a CellSet, got {type(other).__name__}")
        if self.params != other.params:
            raise ValidationError(f"space mismatch: {self.params} vs {other.params}")

    def __xor__(self, other: CellSet) -> CellSet:
        self._same_space(other)
        return CellSet(self.params, self.mask ^ other.mask)

    def __or__(self, other: CellSet) -> CellSet:
        self._same_space(other)
        return CellSet(self.params, self.mask | other.mask)

    def __and__(self, other: CellSet) -> CellSet:
        self._same_space(other)
        return CellSet(self.params, self.mask & other.mask)

    def __sub__(self, other: CellSet) -> CellSet:
        self._same_space(other)
        return CellSet(self.params, self.mask & ~other.mask)

    def issubset(self, other: CellSet) -> bool:
        self._same_space(other)
        return self.mask & ~other.mask == 0

    def points(self) -> list[Point]:
        return list(self)

    def __repr__(self) -> str:
        return f"CellSet(k={self.params.k}, n={self.params.n}, cells={self.points()})"

    def to_json(self) -> dict:
        return {"k": self.params.k, "n": self.params.n, "cells": [list(p) for p in self]}

    @classmethod
    def from_json(cls, doc: dict, cap: int = DEFAULT_CELL_CAP) -> CellSet:
        try:
            params = Params(int(doc["k"]), int(doc["n"]), cap)
            cells = doc["cells"]
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"not a CellSet document: {exc}") from None
        if not isinstance(cells, list):
            raise ValidationError("'cells' must be a list")
        return cls.from_points(params, cells)

    def dumps(self) -> str:
        return json.dumps(self.to_json(), separators=(",", ":"))


def symdiff(a: CellSet, b: CellSet) -> CellSet:
    return a ^ b


def union(a: CellSet, b: CellSet) -> CellSet:
    return a | b


def intersect(a: CellSet, b: CellSet) -> CellSet:
    return a & b


def cartesian_product(a: CellSet, b: CellSet) -> CellSet:
    """``{x + y : x in a, y in b}`` as a subset of ``Q_k^(p+q)``."""
    if a.params.k != b.params.k:
        raise ValidationError(f"alphabet mismatch: {a.params.k} vs {b.params.k}")
    params = Params(a.params.k, a.params.n + b.params.n, max(a.params.cap, b.params.cap))
    shift = a.params.size
    m = 0
    for j in b.ranks():
        m |= a.mask << (j * shift)
    return CellSet(params, m)


@dataclass(frozen=True)
class Graph:
    """Induced minimal-distance graph; vertices and adjacency lists are rank-sorted."""

    params: Params
    vertices: tuple[int, ...]
    adjacency: dict[int, tuple[int, ...]]

    @property
    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in self.vertices for v in self.adjacency[u] if u < v]

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])


def induced_adjacency(s: CellSet) -> Graph:
    """The subgraph of the Hamming graph induced by ``s``."""
    k, n = s.params.k, s.params.n
    strides = [k**i for i in range(n)]
    adjacency: dict[int, tuple[int, ...]] = {}
    for r in s.ranks():
        nbrs = []
        for i, stride in enumerate(strides):
            c = r // stride % k
            origin = r - c * stride
            for v in range(k):
                q = origin + v * stride
                if v != c and s.mask >> q & 1:
                    nbrs.append(q)
        adjacency[r] = tuple(sorted(nbrs))
    return Graph(s.params, tuple(adjacency), adjacency)
