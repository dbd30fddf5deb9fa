"""Exhaustive and backtracking searches over subsets of Q_k^n.

The workhorse is :func:`_codes`, a depth-first search for sets meeting every
line in exactly ``t`` cells.  Cells carry three states (in, out, free) held in
two bitmasks; each node runs line propagation to a fixpoint and then branches
on the most constrained line.  Enumeration, splitting, quasigroup completion
and embedding are all phrased as calls to it with different forced cells.
"""

from __future__ import annotations

import itertools
import json
import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Iterator, Sequence

import numpy as np

from .construct import boolean_subcube, upset_mask
from .core import CellSet, Params, Point, ValidationError, line_masks, rank, unrank
from .verify import Certificate, bipartition, connected_components, is_latin_bitrade, is_t_fold_mds

DEFAULT_NODE_BUDGET = 10**9
DEFAULT_STORE_CAP = 10**6
RAW_SCAN_LIMIT = 20
BACKTRACK_LIMIT = 256


class SearchRefused(RuntimeError):
    """A search would exceed its node budget, storage cap or size guard."""


@dataclass
class SearchReport:
    objective: str
    params: Params
    count: int = 0
    histogram: dict[int, int] = field(default_factory=dict)
    nodes: int = 0
    objects: list[CellSet] | None = None
    extra: dict[str, Any] = field(default_factory=dict)

    def to_json(self, with_objects: bool = True) -> dict:
        doc: dict[str, Any] = {
            "objective": self.objective,
            "k": self.params.k,
            "n": self.params.n,
            "count": self.count,
            "histogram": {str(s): c for s, c in sorted(self.histogram.items())},
            "nodes": self.nodes,
        }
        doc.update(self.extra)
        if with_objects and self.objects is not None:
            doc["objects"] = [o.to_json() for o in self.objects]
        return doc

    def dumps(self, with_objects: bool = True) -> str:
        return json.dumps(self.to_json(with_objects), separators=(",", ":"))


class _Budget:
    def __init__(self, limit: int):
        self.limit = limit
        self.nodes = 0

    def tick(self) -> None:
        self.nodes += 1
        if self.nodes > self.limit:
            raise SearchRefused(f"node budget of {self.limit} exhausted")


# ---------------------------------------------------------------------------
# exact-count line search


def _propagate(lms: Sequence[int], t: int, inside: int, outside: int) -> tuple[int, int] | None:
    changed = True
    while changed:
        changed = False
        decided = inside | outside
        for lm in lms:
            free = lm & ~decided
            cin = (inside & lm).bit_count()
            if not free:
                if cin != t:
                    return None
                continue
            need = t - cin
            nfree = free.bit_count()
            if need < 0 or need > nfree:
                return None
            if need == 0:
                outside |= free
            elif need == nfree:
                inside |= free
            else:
                continue
            decided = inside | outside
            changed = True
    return inside, outside


def _branch_line(lms: Sequence[int], t: int, inside: int, outside: int) -> tuple[int, int] | None:
    best = None
    decided = inside | outside
    for lm in lms:
        free = lm & ~decided
        if not free:
            continue
        need = t - (inside & lm).bit_count()
        ways = math.comb(free.bit_count(), need)
        if best is None or ways < best[0]:
            best = (ways, free, need)
            if ways == 2:
                break
    if best is None:
        return None
    return best[1], best[2]


def _bits(m: int) -> list[int]:
    out = []
    while m:
        low = m & -m
        out.append(low)
        m ^= low
    return out


def _children(lms, t, inside, outside):
    choice = _branch_line(lms, t, inside, outside)
    if choice is None:
        return
    free, need = choice
    cells = _bits(free)
    for picked in itertools.combinations(cells, need):
        add = sum(picked)
        yield inside | add, outside | (free & ~add)


def _codes(
    params: Params,
    t: int,
    inside: int = 0,
    outside: int = 0,
    budget: _Budget | None = None,
) -> Iterator[int]:
    """Yield masks of every set meeting each line in exactly ``t`` cells,
    containing ``inside`` and avoiding ``outside``, each exactly once."""
    lms = line_masks(params)
    full = params.full_mask
    budget = budget or _Budget(DEFAULT_NODE_BUDGET)
    if inside & outside:
        return
    stack = [(inside, outside)]
    while stack:
        budget.tick()
        state = _propagate(lms, t, *stack.pop())
        if state is None:
            continue
        ins, outs = state
        if ins | outs == full:
            yield ins
            continue
        # reversed so that the first child is explored first
        stack.extend(reversed(list(_children(lms, t, ins, outs))))


def _subtree(args: tuple[int, int, int, int, int, int]) -> tuple[list[int], int]:
    k, n, t, inside, outside, limit = args
    budget = _Budget(limit)
    found = list(_codes(Params(k, n, cap=k**n), t, inside, outside, budget))
    return found, budget.nodes


def _check_fold(params: Params, t: int) -> None:
    if not 0 <= t <= params.k:
        raise ValidationError(f"fold t={t} outside [0, {params.k}]")


def enumerate_mds_report(
    params: Params,
    t: int = 1,
    *,
    workers: int = 1,
    node_budget: int = DEFAULT_NODE_BUDGET,
    store_cap: int = DEFAULT_STORE_CAP,
    self_check: bool = False,
) -> SearchReport:
    """All ``t``-fold MDS codes of ``params`` sorted by mask.

    With ``workers > 1`` the children of the root node are searched in
    separate processes; each gets the full node budget and the merged result
    is identical to the sequential one.
    """
    _check_fold(params, t)
    masks: list[int]
    if workers <= 1:
        budget = _Budget(node_budget)
        masks = []
        for m in _codes(params, t, budget=budget):
            masks.append(m)
            if len(masks) > store_cap:
                raise SearchRefused(f"more than {store_cap} codes; raise the store cap")
        nodes = budget.nodes
    else:
        lms = line_masks(params)
        root = _propagate(lms, t, 0, 0)
        masks, nodes = [], 1
        if root is not None:
            if root[0] | root[1] == params.full_mask:
                masks = [root[0]]
            else:
                jobs = [
                    (params.k, params.n, t, i, o, node_budget)
                    for i, o in _children(lms, t, *root)
                ]
                with ProcessPoolExecutor(max_workers=workers) as pool:
                    for found, used in pool.map(_subtree, jobs):
                        masks.extend(found)
                        nodes += used
        if len(masks) > store_cap:
            raise SearchRefused(f"more than {store_cap} codes; raise the store cap")
    masks.sort()
    codes = [CellSet(params, m) for m in masks]
    if self_check:
        for c in codes:
            assert is_t_fold_mds(c, t), c
    return SearchReport(
        "mds",
        params,
        count=len(codes),
        histogram=dict(Counter(len(c) for c in codes)),
        nodes=nodes,
        objects=codes,
        extra={"t": t},
    )


def enumerate_mds(params: Params, t: int = 1, **kwargs) -> Iterator[CellSet]:
    """Every ``t``-fold MDS code of ``params`` once, in ascending mask order."""
    yield from enumerate_mds_report(params, t, **kwargs).objects or ()


# ---------------------------------------------------------------------------
# bitrade catalogues


def enumerate_bitrades_q3(n: int) -> Iterator[CellSet]:
    """The Moebius bitrades of Q_3^n for every subset of ``{0,1}^n`` in rank order.

    Subset ``i`` contains the j-th point of ``{0,1}^n`` (binary rank order)
    iff bit j of ``i`` is set.  The map is linear over GF(2), so each output
    is the previous one with a single up-set toggled.
    """
    if not 1 <= n <= 4:
        raise SearchRefused(f"Q_3^{n} has 2^(2^{n}) bitrades; only n <= 4 is enumerated")
    params = Params(3, n)
    cube = list(boolean_subcube(n))
    cube.sort(key=lambda p: sum(c << i for i, c in enumerate(p)))
    ups = [upset_mask(x, params) for x in cube]
    out = [0] * (1 << len(cube))
    for i in range(1, len(out)):
        low = i & -i
        out[i] = out[i ^ low] ^ ups[low.bit_length() - 1]
    for m in out:
        yield CellSet(params, m)


def bitrade_subsets(n: int) -> Iterator[CellSet]:
    """The subsets of ``{0,1}^n`` in the order used by :func:`enumerate_bitrades_q3`."""
    params = Params(3, n)
    cube = sorted(boolean_subcube(n), key=lambda p: sum(c << i for i, c in enumerate(p)))
    for i in range(1 << len(cube)):
        yield CellSet.from_points(params, (p for j, p in enumerate(cube) if i >> j & 1))


def _raw_bitrade_scan(params: Params) -> list[int]:
    size = params.size
    subsets = np.arange(1 << size, dtype=np.uint32)
    ok = np.ones(subsets.shape, dtype=bool)
    for lm in line_masks(params):
        c = np.bitwise_count(subsets & np.uint32(lm))
        ok &= (c == 0) | (c == 2)
    return [int(m) for m in np.flatnonzero(ok)]


def _backtrack_bitrades(params: Params, budget: _Budget) -> list[int]:
    # cells decided in rank order; a line is closed once its last cell is decided
    k, n, size = params.k, params.n, params.size
    strides = [k**i for i in range(n)]
    cell_lines = []
    for r in range(size):
        ids = []
        for i, st in enumerate(strides):
            c = r // st % k
            origin = r - c * st
            # line id: direction then base rank, matching line_masks
            base = origin // (st * k) * st + origin % st
            ids.append((i * k ** (n - 1) + base, c == k - 1))
        cell_lines.append(ids)
    counts = [0] * (n * k ** (n - 1))
    found: list[int] = []

    def rec(r: int, mask: int) -> None:
        budget.tick()
        if r == size:
            found.append(mask)
            return
        lines_here = cell_lines[r]
        # leave the cell out
        if all(not last or counts[lid] in (0, 2) for lid, last in lines_here):
            rec(r + 1, mask)
        # put the cell in
        if all(counts[lid] < 2 and (not last or counts[lid] == 1) for lid, last in lines_here):
            for lid, _ in lines_here:
                counts[lid] += 1
            rec(r + 1, mask | 1 << r)
            for lid, _ in lines_here:
                counts[lid] -= 1

    rec(0, 0)
    found.sort()
    return found


def brute_force_bitrades(
    params: Params,
    *,
    node_budget: int = DEFAULT_NODE_BUDGET,
    store_cap: int = DEFAULT_STORE_CAP,
    self_check: bool = False,
) -> SearchReport:
    """Every latin bitrade of ``params``, independent of the Moebius construction.

    Up to ``RAW_SCAN_LIMIT`` cells all subsets are filtered directly; spaces
    up to ``BACKTRACK_LIMIT`` cells are searched cell by cell in rank order
    with line-count pruning.
    """
    if params.size <= RAW_SCAN_LIMIT:
        masks = _raw_bitrade_scan(params)
        nodes = 1 << params.size
        strategy = "subset-scan"
    elif params.size <= BACKTRACK_LIMIT:
        budget = _Budget(node_budget)
        masks = _backtrack_bitrades(params, budget)
        nodes = budget.nodes
        strategy = "backtracking"
    else:
        raise SearchRefused(f"Q_{params.k}^{params.n} is too large for bitrade enumeration")
    if len(masks) > store_cap:
        raise SearchRefused(f"{len(masks)} bitrades exceed the store cap of {store_cap}")
    objects = [CellSet(params, m) for m in masks]
    if self_check:
        for b in objects:
            assert is_latin_bitrade(b), b
    return SearchReport(
        "bitrades",
        params,
        count=len(objects),
        histogram=dict(Counter(len(b) for b in objects)),
        nodes=nodes,
        objects=objects,
        extra={"strategy": strategy},
    )


# ---------------------------------------------------------------------------
# spectra, splitting, completion, embedding


def pairwise_symdiff_spectrum(
    codes: Sequence[CellSet], t: int = 1, *, include_diagonal: bool = False
) -> SearchReport:
    """Histogram of ``|a ^ b|`` over unordered pairs of distinct codes.

    With ``include_diagonal`` each code is also paired with itself.  For
    ``t = 1`` every symmetric difference must be a latin bitrade; a failure
    raises.  ``interval_sizes`` lists the sizes strictly between 2^n and
    2^(n+1).
    """
    if not codes:
        raise ValidationError("no codes given")
    params = codes[0].params
    for c in codes:
        if c.params != params:
            raise ValidationError("codes live in different spaces")
        if not is_t_fold_mds(c, t):
            raise ValidationError(f"{c} is not a {t}-fold MDS code")
    lms = line_masks(params)
    hist: Counter[int] = Counter()
    bitrade_pairs = 0
    pairs = 0
    if params.size <= 64:
        arr = np.array([c.mask for c in codes], dtype=np.uint64)
        lm_arr = [np.uint64(lm) for lm in lms]
        for i in range(len(codes)):
            start = i if include_diagonal else i + 1
            d = arr[start:] ^ arr[i]
            if not d.size:
                continue
            pairs += d.size
            sizes, freq = np.unique(np.bitwise_count(d), return_counts=True)
            hist.update(dict(zip(sizes.tolist(), freq.tolist())))
            ok = np.ones(d.shape, dtype=bool)
            for lm in lm_arr:
                cnt = np.bitwise_count(d & lm)
                ok &= (cnt == 0) | (cnt == 2)
            bitrade_pairs += int(ok.sum())
    else:
        masks = [c.mask for c in codes]
        for i, a in enumerate(masks):
            for b in masks[i if include_diagonal else i + 1 :]:
                d = a ^ b
                pairs += 1
                hist[d.bit_count()] += 1
                if all((d & lm).bit_count() in (0, 2) for lm in lms):
                    bitrade_pairs += 1
    if t == 1 and bitrade_pairs != pairs:
        raise AssertionError("a symmetric difference of two MDS codes is not a latin bitrade")
    lo, hi = 1 << params.n, 1 << (params.n + 1)
    return SearchReport(
        "spectrum",
        params,
        count=pairs,
        histogram=dict(hist),
        nodes=pairs,
        extra={
            "t": t,
            "codes": len(codes),
            "bitrade_pairs": bitrade_pairs,
            "interval_sizes": sorted(s for s in hist if lo < s < hi),
        },
    )


def split_check(w: CellSet, t: int, *, node_budget: int = DEFAULT_NODE_BUDGET) -> Certificate:
    """Decide whether a ``t``-fold MDS code is a disjoint union of ``t`` MDS codes.

    The first MDS code is required to contain the least-rank cell of ``w``;
    the search recurses on the remainder with ``t - 1``.
    """
    if not is_t_fold_mds(w, t):
        raise ValidationError(f"input is not a {t}-fold MDS code")
    budget = _Budget(node_budget)
    parts = _split(w.params, w.mask, t, budget)
    if parts is None:
        return Certificate(False, "exhaustion-summary", {"nodes": budget.nodes, "t": t})
    codes = [CellSet(w.params, m) for m in parts]
    for c in codes:
        assert is_t_fold_mds(c, 1)
    return Certificate(True, "found-subcode", {"decomposition": codes, "nodes": budget.nodes})


def _split(params: Params, w: int, t: int, budget: _Budget) -> list[int] | None:
    if t == 0:
        return [] if w == 0 else None
    if t == 1:
        return [w]
    anchor = w & -w
    for m in _codes(params, 1, inside=anchor, outside=params.full_mask & ~w, budget=budget):
        rest = _split(params, w & ~m, t - 1, budget)
        if rest is not None:
            return [m, *rest]
    return None


@dataclass(frozen=True)
class PartialQuasigroup:
    """A partial map ``Q_k^n -> Q_k`` whose graph meets each line at most once."""

    k: int
    n: int
    values: dict[Point, int]

    def __post_init__(self) -> None:
        params = Params(self.k, self.n)
        seen: dict[tuple[int, int, Point], Point] = {}
        for x, v in self.values.items():
            if len(x) != self.n or any(not 0 <= c < self.k for c in x) or not 0 <= v < self.k:
                raise ValidationError(f"bad entry {x} -> {v} for order {self.k}")
            rank(x, params)
            for i in range(self.n):
                key = (i, v, x[:i] + x[i + 1 :])
                if key in seen:
                    raise ValidationError(
                        f"{seen[key]} and {x} share a line and the value {v}"
                    )
                seen[key] = x

    @classmethod
    def from_graph(cls, s: CellSet) -> PartialQuasigroup:
        """Read cells ``(x, v)`` of Q_k^(n+1) as ``x -> v``."""
        if s.params.n < 2:
            raise ValidationError("graph needs at least two coordinates")
        values: dict[Point, int] = {}
        for p in s:
            if p[:-1] in values:
                raise ValidationError(f"{p[:-1]} has two values")
            values[p[:-1]] = p[-1]
        return cls(s.params.k, s.params.n - 1, values)

    def graph(self, k: int | None = None) -> CellSet:
        return CellSet.from_points(
            Params(k or self.k, self.n + 1), (x + (v,) for x, v in self.values.items())
        )

    @property
    def is_total(self) -> bool:
        return len(self.values) == self.k**self.n

    def table(self) -> list[int]:
        params = Params(self.k, self.n)
        return [self.values[unrank(r, params)] for r in range(params.size)]


def complete_partial_quasigroup(
    p: PartialQuasigroup, m: int, *, node_budget: int = DEFAULT_NODE_BUDGET
) -> PartialQuasigroup | None:
    """Extend ``p`` to an n-ary quasigroup of order ``m``, or ``None`` if none exists."""
    if m < p.k:
        raise ValidationError(f"target order {m} is below the current order {p.k}")
    params = Params(m, p.n + 1)
    forced = p.graph(m).mask
    for code in _codes(params, 1, inside=forced, budget=_Budget(node_budget)):
        return PartialQuasigroup.from_graph(CellSet(params, code))
    return None


def embedding_search(
    b: CellSet, t: int = 1, *, node_budget: int = DEFAULT_NODE_BUDGET, max_components: int = 16
) -> SearchReport:
    """Look for a ``t``-fold MDS code ``M`` with ``M ^ b`` again ``t``-fold.

    In any such embedding ``b & M`` is a colour class of a proper 2-colouring
    of ``b``, so each colouring (one flip bit per connected component) is
    tried with that class forced in and the other forced out.
    """
    if not is_latin_bitrade(b):
        raise ValidationError("input is not a latin bitrade")
    cert = bipartition(b)
    if not cert:
        raise ValidationError("input bitrade is not bipartite")
    _check_fold(b.params, t)
    part0 = cert["parts"][0].mask
    comps = [c.mask for c in connected_components(b)]
    if len(comps) > max_components:
        raise SearchRefused(f"{len(comps)} components exceed the limit of {max_components}")
    budget = _Budget(node_budget)
    tried = 0
    for flips in range(1 << len(comps)):
        tried += 1
        flip = 0
        for j, cm in enumerate(comps):
            if flips >> j & 1:
                flip |= cm
        inside = part0 ^ flip
        outside = b.mask & ~inside
        for code in _codes(b.params, t, inside, outside, budget):
            m = CellSet(b.params, code)
            return SearchReport(
                "embed",
                b.params,
                count=1,
                histogram={len(m): 1},
                nodes=budget.nodes,
                objects=[m, m ^ b],
                extra={"t": t, "colourings_tried": tried},
            )
    return SearchReport(
        "embed",
        b.params,
        count=0,
        nodes=budget.nodes,
        objects=[],
        extra={"t": t, "colourings_tried": tried},
    )
