"""Placement search shared by the box and hypercube approximations."""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import gridcount
from ._kernels import descend_last_axis, first_free_anchor
from .core import InputDomainError, OpenBox, PointSet

# y_1 slices searched per round; fixed so that results do not depend on the
# worker count
SLICE_BLOCK = 4

# largest grid the dense engine materializes (int64 tensors, a few copies)
DENSE_CELL_LIMIT = 1 << 24


def interior_points(points: PointSet) -> np.ndarray:
    """Points strictly inside the unit cube; boundary points cannot block an open box."""
    arr = points.points
    if np.any((arr < 0.0) | (arr > 1.0)):
        bad = int(np.flatnonzero(np.any((arr < 0.0) | (arr > 1.0), axis=1))[0])
        raise InputDomainError(
            f"point {bad} {arr[bad].tolist()} is outside the unit cube; normalize first"
        )
    keep = np.all((arr > 0.0) & (arr < 1.0), axis=1)
    return np.ascontiguousarray(arr[keep])


@dataclass
class Counters:
    tests: int = 0
    placements: int = 0
    max_placements: int = 0
    max_cells: int = 0

    def absorb(self, arr) -> None:
        self.tests += int(arr[0])
        self.placements += int(arr[1])
        self.max_placements = max(self.max_placements, int(arr[2]))
        self.max_cells = max(self.max_cells, int(arr[3]))

    def merge(self, other: "Counters") -> None:
        self.tests += other.tests
        self.placements += other.placements
        self.max_placements = max(self.max_placements, other.max_placements)
        self.max_cells = max(self.max_cells, other.max_cells)


@dataclass
class Hit:
    exponents: tuple
    anchor: tuple

    @property
    def level(self) -> int:
        return sum(self.exponents)


class PlacementIndex:
    """Cell indices, grid extents and anchor counts for every (axis, ladder entry).

    Canonical grids along axis ``i`` only depend on the ladder entry used on
    that axis, so they are computed once and shared by all exponent tuples.
    """

    def __init__(self, pts: np.ndarray, ladder, m: int):
        self.pts = pts
        self.n, self.d = pts.shape
        self.k = len(ladder)
        self.m = int(m)
        self.cell_len = np.array([x / m for x in ladder], dtype=np.float64)
        self.EE = np.empty((self.d, self.k), dtype=np.int64)
        self.AA = np.empty((self.d, self.k), dtype=np.int64)
        self.QQ = np.empty((self.d, self.k, self.n), dtype=np.int64)
        for y, c in enumerate(self.cell_len):
            e = gridcount.axis_extent(c)
            a = gridcount.axis_anchor_count(c, self.m)
            for i in range(self.d):
                self.EE[i, y] = e
                self.AA[i, y] = a
                self.QQ[i, y, :] = gridcount.cell_index(pts[:, i], c, e)

    def grid(self, y) -> gridcount.GridSpec:
        return gridcount.GridSpec(tuple(self.cell_len[v] for v in y))

    def box(self, y, anchor) -> OpenBox:
        c = [self.cell_len[v] for v in y]
        lo = [j * ci for j, ci in zip(anchor, c)]
        hi = [(j + self.m) * ci for j, ci in zip(anchor, c)]
        return OpenBox(lo, hi)

    def _sparse_cost(self, y) -> float:
        # worst case of the compiled walk: every candidate on the leading axes
        # filters the points still blocking, then the last two axes are swept
        cost, visits, active = 0.0, 1.0, float(self.n)
        for v in y[:-2]:
            cost += visits * (active + 1.0) * active
            visits *= active + 1.0
            active = max(1.0, active * min(1.0, self.m * self.cell_len[v]))
        return cost + visits * 30.0 * active * math.log2(active + 2.0)

    def _dense_cost(self, y) -> float:
        # numpy passes over the cell tensor, a few times slower per element
        return 4.0 * float(self.cells(y)) * (2 ** self.d + 2)

    def prefers_dense(self, y) -> bool:
        return self._dense_cost(y) < self._sparse_cost(y)

    def free_anchor_dense(self, y):
        """Lexicographically first free anchor via cell, corner and window tensors."""
        shape = tuple(int(self.EE[i, v]) for i, v in enumerate(y))
        anchors = tuple(int(self.AA[i, v]) for i, v in enumerate(y))
        if min(anchors) <= 0:
            return None
        idx = np.stack([self.QQ[i, v] for i, v in enumerate(y)], axis=1) if self.n else np.zeros((0, self.d), np.int64)
        cells = gridcount.CountTensor(gridcount.cell_counts_from_indices(idx, shape), gridcount.CELL)
        corner = gridcount.corner_counts(cells)
        Q = gridcount.all_box_counts(corner, (self.m,) * self.d).values
        Q = Q[tuple(slice(0, a) for a in anchors)]
        free = np.flatnonzero(Q.ravel() == 0)
        if free.size == 0:
            return None
        return tuple(int(v) for v in np.unravel_index(free[0], Q.shape))

    def free_anchor_sparse(self, y):
        q = np.ascontiguousarray(np.stack([self.QQ[i, v] for i, v in enumerate(y)]))
        anchors = np.array([self.AA[i, v] for i, v in enumerate(y)], dtype=np.int64)
        out = np.zeros(self.d, dtype=np.int64)
        if first_free_anchor(q, anchors, self.m, out):
            return tuple(int(v) for v in out)
        return None

    def cells(self, y) -> int:
        return math.prod(int(self.EE[i, v]) for i, v in enumerate(y))

    def free_anchor(self, y, engine: str = "auto"):
        if self.cells(y) > DENSE_CELL_LIMIT:
            return self.free_anchor_sparse(y)
        if engine == "dense" or (engine == "auto" and self.prefers_dense(y)):
            return self.free_anchor_dense(y)
        return self.free_anchor_sparse(y)

    def count(self, y, counters: Counters) -> None:
        pl = math.prod(max(int(self.AA[i, v]), 0) for i, v in enumerate(y))
        cells = self.cells(y)
        counters.tests += 1
        counters.placements += pl
        counters.max_placements = max(counters.max_placements, pl)
        counters.max_cells = max(counters.max_cells, cells)

    def descend(self, prefix, y_hi: int, y_lo: int, counters: Counters, engine: str = "auto"):
        """First last-axis exponent in ``y_hi..y_lo`` (descending) with a free anchor."""
        if y_hi < y_lo:
            return None
        sparse_ok = engine == "sparse" or (
            engine == "auto"
            and self._sparse_cost(prefix + (y_hi,)) <= self._dense_cost(prefix + (y_lo,))
        )
        if sparse_ok:
            out = np.zeros(self.d, dtype=np.int64)
            arr = np.zeros(4, dtype=np.int64)
            y = descend_last_axis(
                self.QQ, self.AA, self.EE, self.m,
                np.array(prefix, dtype=np.int64), y_hi, y_lo, out, arr,
            )
            counters.absorb(arr)
            if y < 0:
                return None
            return Hit(prefix + (int(y),), tuple(int(v) for v in out))
        for yd in range(y_hi, y_lo - 1, -1):
            y = prefix + (yd,)
            self.count(y, counters)
            anchor = self.free_anchor(y, engine)
            if anchor is not None:
                return Hit(y, anchor)
        return None


def _gallop_bound(index: PlacementIndex, prefix, lo: int, floor: int, counters: Counters,
                  engine: str) -> int:
    """Upper bound on the feasible last exponent after ``lo`` failed.

    Probes ``lo - 2, lo - 4, lo - 8, ...`` (not below ``floor``) until one is
    feasible. A low infeasible probe bounds every prefix that dominates this
    one, which spares their own checks later in this slice and in later
    slices.
    """
    bound = lo - 1
    step = 2
    while bound >= floor:
        t = max(lo - step, floor)
        if index.descend(prefix, t, t, counters, engine) is not None:
            break
        bound = t - 1
        step *= 2
    return bound


def _search_slice(index: PlacementIndex, y1: int, best_level: int, min_level: int,
                  base_ub: dict, engine: str):
    """Best tuple with first exponent ``y1`` and level above ``best_level``.

    Relies on feasibility being monotone: shrinking any exponent keeps an
    empty placement (the finer grid still fits inside the larger box), so
    the largest feasible last exponent can only drop as other exponents grow.
    """
    k, d = index.k, index.d
    counters = Counters()
    ub_local: dict = {}
    best: Hit | None = None
    cur = best_level
    for rest in itertools.product(range(k), repeat=d - 2):
        psum = y1 + sum(rest)
        hi = min(k - 1, base_ub.get(rest, k - 1))
        for j, r in enumerate(rest):
            if r:
                hi = min(hi, ub_local.get(rest[:j] + (r - 1,) + rest[j + 1:], k - 1))
        lo = max(cur + 1 - psum, min_level - psum, 0)
        if hi < lo:
            ub_local[rest] = hi
            continue
        hit = index.descend((y1,) + rest, hi, lo, counters, engine)
        if hit is None:
            floor = max(min_level - psum, 0)
            ub_local[rest] = _gallop_bound(index, (y1,) + rest, lo, floor, counters, engine)
            continue
        ub_local[rest] = hit.exponents[-1]
        best = hit
        cur = hit.level
    return best, ub_local, counters


def frontier_search(index: PlacementIndex, min_level: int, threads: int = 1,
                    engine: str = "auto"):
    """Feasible exponent tuple of maximum level (ties: lexicographically smallest)."""
    k = index.k
    best: Hit | None = None
    counters = Counters()
    base_ub: dict = {}
    pool = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
    try:
        for start in range(0, k, SLICE_BLOCK):
            y1s = list(range(start, min(k, start + SLICE_BLOCK)))
            best_level = best.level if best is not None else min_level - 1
            args = [(index, y1, best_level, min_level, base_ub, engine) for y1 in y1s]
            if pool is None:
                results = [_search_slice(*a) for a in args]
            else:
                results = list(pool.map(lambda a: _search_slice(*a), args))
            merged = dict(base_ub)
            for hit, ub, c in results:
                counters.merge(c)
                if hit is not None and (best is None or hit.level > best.level):
                    best = hit
                for key, v in ub.items():
                    merged[key] = min(merged.get(key, k - 1), v)
            base_ub = merged
    finally:
        if pool is not None:
            pool.shutdown()
    return best, counters


def exhaustive_search(index: PlacementIndex, tuples, engine: str = "auto"):
    """Test every tuple; keep max level, then lexicographically smallest tuple."""
    best: Hit | None = None
    counters = Counters()
    for y in tuples:
        y = tuple(y)
        index.count(y, counters)
        anchor = index.free_anchor(y, engine)
        if anchor is not None and (best is None or sum(y) > best.level):
            best = Hit(y, anchor)
    return best, counters
