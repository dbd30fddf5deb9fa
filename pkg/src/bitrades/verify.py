"""Certificate-producing checks for bitrades, multi-fold MDS codes and embeddings.

Every check returns a :class:`Certificate`.  A negative verdict always carries
the canonically first witness (lowest line index, first conflicting edge in
breadth-first order) so that regressions are reproducible.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from typing import Any

from .core import (
    CellSet,
    Line,
    ValidationError,
    faces,
    induced_adjacency,
    line_at,
    line_masks,
    unrank,
)

WITNESS_TYPES = (
    "none",
    "violating-line",
    "odd-cycle",
    "bipartition",
    "projection-map",
    "found-subcode",
    "exhaustion-summary",
)


@dataclass(frozen=True)
class Certificate:
    verdict: bool
    kind: str = "none"
    data: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.kind not in WITNESS_TYPES:
            raise ValueError(f"unknown witness type {self.kind!r}")

    def __bool__(self) -> bool:
        return self.verdict

    def __getitem__(self, key: str) -> Any:
        return self.data[key]

    def to_json(self) -> dict:
        return {"verdict": self.verdict, "witness": {"type": self.kind, **_jsonify(self.data)}}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), separators=(",", ":"))


def _jsonify(obj: Any) -> Any:
    if isinstance(obj, (CellSet, Line)):
        return obj.to_json()
    if isinstance(obj, dict):
        return {str(k): _jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonify(v) for v in obj]
    return obj


def _first_bad_line(s: CellSet, allowed: frozenset[int]) -> tuple[int, int] | None:
    mask = s.mask
    for i, lm in enumerate(line_masks(s.params)):
        c = (mask & lm).bit_count()
        if c not in allowed:
            return i, c
    return None


def _line_witness(s: CellSet, bad: tuple[int, int]) -> Certificate:
    i, c = bad
    return Certificate(False, "violating-line", {"line": line_at(s.params, i), "count": c})


def is_latin_bitrade(s: CellSet) -> Certificate:
    """Every line meets ``s`` in 0 or 2 cells."""
    bad = _first_bad_line(s, frozenset((0, 2)))
    if bad is not None:
        return _line_witness(s, bad)
    return Certificate(True)


def is_t_fold_mds(s: CellSet, t: int) -> Certificate:
    """Every line meets ``s`` in exactly ``t`` cells."""
    if not 0 <= t <= s.params.k:
        raise ValidationError(f"fold t={t} outside [0, {s.params.k}]")
    bad = _first_bad_line(s, frozenset((t,)))
    if bad is not None:
        return _line_witness(s, bad)
    assert len(s) == t * s.params.k ** (s.params.n - 1)
    return Certificate(True)


def bipartition(s: CellSet) -> Certificate:
    """Two-colour the induced Hamming graph of ``s`` or exhibit an odd cycle.

    Components are scanned from their least-rank vertex, which gets colour 0.
    """
    g = induced_adjacency(s)
    colour: dict[int, int] = {}
    parent: dict[int, int] = {}
    for root in g.vertices:
        if root in colour:
            continue
        colour[root] = 0
        parent[root] = -1
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for v in g.adjacency[u]:
                if v not in colour:
                    colour[v] = colour[u] ^ 1
                    parent[v] = u
                    queue.append(v)
                elif colour[v] == colour[u]:
                    cycle = _odd_cycle(u, v, parent)
                    return Certificate(
                        False, "odd-cycle", {"cycle": [unrank(r, s.params) for r in cycle]}
                    )
    parts = (
        CellSet.from_ranks(s.params, (r for r, c in colour.items() if c == 0)),
        CellSet.from_ranks(s.params, (r for r, c in colour.items() if c == 1)),
    )
    return Certificate(True, "bipartition", {"parts": parts})


def _odd_cycle(u: int, v: int, parent: dict[int, int]) -> list[int]:
    # u and v share a BFS depth, so climbing in lockstep meets at the common ancestor
    left, right = [u], [v]
    while left[-1] != right[-1]:
        left.append(parent[left[-1]])
        right.append(parent[right[-1]])
    return left + right[-2::-1]


def connected_components(s: CellSet) -> list[CellSet]:
    g = induced_adjacency(s)
    seen: set[int] = set()
    out = []
    for root in g.vertices:
        if root in seen:
            continue
        comp = {root}
        stack = [root]
        while stack:
            u = stack.pop()
            for v in g.adjacency[u]:
                if v not in comp:
                    comp.add(v)
                    stack.append(v)
        seen |= comp
        out.append(CellSet.from_ranks(s.params, comp))
    return out


@dataclass(frozen=True)
class MinimalReport:
    """Flags of the four equivalent characterisations of a size-2^n bitrade."""

    size_is_min: bool
    faces_ok: bool
    two_hyperplanes: bool
    boolean_cube: bool
    projection: dict[tuple[int, ...], tuple[int, ...]] | None = None

    @property
    def flags(self) -> tuple[bool, bool, bool, bool]:
        return (self.size_is_min, self.faces_ok, self.two_hyperplanes, self.boolean_cube)

    @property
    def consistent(self) -> bool:
        return len(set(self.flags)) == 1

    def to_json(self) -> dict:
        proj = None
        if self.projection is not None:
            proj = [[list(p), list(b)] for p, b in sorted(self.projection.items())]
        return {
            "a": self.size_is_min,
            "b": self.faces_ok,
            "c": self.two_hyperplanes,
            "d": self.boolean_cube,
            "projection": proj,
        }


def minimal_bitrade_check(b: CellSet) -> MinimalReport:
    """Evaluate the four size-2^n conditions independently.

    The empty set is rejected: the equivalence concerns nonempty bitrades and
    the face condition holds vacuously for it.
    """
    if not is_latin_bitrade(b):
        raise ValidationError("input is not a latin bitrade")
    if not b:
        raise ValidationError("the empty bitrade has no minimal-size characterisation")
    params = b.params
    n = params.n

    size_is_min = len(b) == 1 << n

    faces_ok = all(
        (b.mask & f.mask).bit_count() in (0, 1 << m)
        for m in range(n + 1)
        for f in faces(params, m)
    )

    pts = b.points()
    values = [sorted({p[i] for p in pts}) for i in range(n)]
    two_hyperplanes = all(len(v) == 2 for v in values)

    if two_hyperplanes:
        projection = {p: tuple(values[i].index(p[i]) for i in range(n)) for p in pts}
        boolean_cube = _is_cube_map(b, projection)
    else:
        projection = None
        boolean_cube = _is_boolean_cube(b)
    return MinimalReport(
        size_is_min,
        faces_ok,
        two_hyperplanes,
        boolean_cube,
        projection if boolean_cube else None,
    )


def _is_cube_map(b: CellSet, label: dict) -> bool:
    n = b.params.n
    if len(set(label.values())) != len(label) or len(label) != 1 << n:
        return False
    g = induced_adjacency(b)
    by_rank = {r: label[unrank(r, b.params)] for r in g.vertices}
    for u in g.vertices:
        lu = by_rank[u]
        if len(g.adjacency[u]) != n:
            return False
        for v in g.adjacency[u]:
            if sum(x != y for x, y in zip(lu, by_rank[v])) != 1:
                return False
    return True


def _is_boolean_cube(b: CellSet) -> bool:
    """Recognise an induced graph isomorphic to the Boolean n-cube.

    Root at the least-rank vertex, label its n neighbours with unit vectors
    and every deeper vertex with the OR of its shallower neighbours; the graph
    is a cube iff this labelling is an adjacency-preserving bijection.
    """
    n = b.params.n
    g = induced_adjacency(b)
    if len(g.vertices) != 1 << n:
        return False
    root = g.vertices[0]
    if len(g.adjacency[root]) != n:
        return False
    depth = {root: 0}
    queue = deque([root])
    order = []
    while queue:
        u = queue.popleft()
        order.append(u)
        for v in g.adjacency[u]:
            if v not in depth:
                depth[v] = depth[u] + 1
                queue.append(v)
    if len(order) != len(g.vertices):
        return False
    label = {root: 0}
    for i, v in enumerate(g.adjacency[root]):
        label[v] = 1 << i
    for v in order:
        if depth[v] < 2:
            continue
        lv = 0
        for u in g.adjacency[v]:
            if depth[u] == depth[v] - 1:
                lv |= label[u]
        label[v] = lv
    as_bits = {unrank(r, b.params): tuple(l >> i & 1 for i in range(n)) for r, l in label.items()}
    return _is_cube_map(b, as_bits)


def is_embedded(b: CellSet, m1: CellSet, t: int) -> Certificate:
    """Is ``m1 ^ b`` again a ``t``-fold MDS code?  The witness is that second code."""
    if b.params != m1.params:
        raise ValidationError(f"space mismatch: {b.params} vs {m1.params}")
    if not is_t_fold_mds(m1, t):
        raise ValidationError(f"m1 is not a {t}-fold MDS code")
    m2 = m1 ^ b
    cert = is_t_fold_mds(m2, t)
    if not cert:
        return cert
    assert is_latin_bitrade(b) and bipartition(b)
    return Certificate(True, "found-subcode", {"code": m2})


def component_of(b: CellSet, m1: CellSet, t: int | None = None) -> CellSet:
    """``b & m1`` for a bitrade embedded in ``m1``; ``t`` defaults to m1's line count."""
    if t is None:
        t = (m1.mask & line_masks(m1.params)[0]).bit_count()
    if not is_embedded(b, m1, t):
        raise ValidationError("bitrade is not embedded in the given code")
    return b & m1
