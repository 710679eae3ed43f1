"""(1 - eps)-approximation of the maximum-volume empty box in the unit cube.

Every empty box of maximum volume contains a *canonical* box whose sides are
taken from a geometric ladder ``a^i / a^(k+1)`` and whose lower corner sits on
a grid of pitch ``side / m``. Searching those boxes over their grids, with
emptiness decided by window counts, yields a box of volume at least
``(1 - eps)`` times the optimum.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import gridcount
from ._search import DENSE_CELL_LIMIT, PlacementIndex, exhaustive_search, frontier_search, interior_points
from .core import OpenBox, PointSet, is_empty

BOX = "box"
CUBE = "cube"


def ipow(base: float, exp: int) -> float:
    """``base ** exp`` for a nonnegative integer exponent, by repeated squaring."""
    if exp < 0:
        raise ValueError("negative exponent")
    result = 1.0
    while exp:
        if exp & 1:
            result *= base
        base *= base
        exp >>= 1
    return result


def solve_ladder_length(target: float, a: float) -> int:
    """The integer ``k >= 1`` with ``a^(k-1) <= target < a^k``.

    Estimated from logarithms, then corrected by direct comparison.
    """
    if target < 1.0:
        raise ValueError(f"ladder target must be >= 1, got {target}")
    k = max(1, int(math.floor(math.log(target) / math.log(a))) + 1)
    while k > 1 and ipow(a, k - 1) > target:
        k -= 1
    while ipow(a, k) <= target:
        k += 1
    return k


@dataclass(frozen=True)
class ApproxParams:
    epsilon: float
    epsilon_effective: float
    delta: float
    m: int
    a: float
    k: int
    ladder: tuple
    seed: int | None
    jitter: bool
    mode: str = BOX

    def large_level(self, d: int) -> int:
        """Smallest exponent sum of a large canonical box, ``dk - k - d``."""
        return d * self.k - self.k - d

    def to_dict(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "epsilon_effective": self.epsilon_effective,
            "delta": self.delta,
            "m": self.m,
            "a": self.a,
            "k": self.k,
            "seed": self.seed,
            "jitter": self.jitter,
            "mode": self.mode,
        }


def _effective_epsilon(d: int, epsilon: float, seed, jitter: bool) -> float:
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    if not jitter:
        return float(epsilon)
    rng = np.random.default_rng(seed)
    return float(rng.uniform((1.0 - 1.0 / (2 * d)) * epsilon, epsilon))


def _ladder(a: float, k: int) -> tuple:
    return tuple(1.0 / ipow(a, k + 1 - i) for i in range(k))


def _base_params(d: int, epsilon: float, seed, jitter: bool):
    if d < 2:
        raise ValueError(f"dimension must be >= 2, got {d}")
    eps = _effective_epsilon(d, epsilon, seed, jitter)
    delta = eps / (2 * d)
    # ceil(2d / eps) evaluated exactly on the binary value of eps
    m = math.ceil(Fraction(2 * d) / Fraction(eps))
    a = 1.0 / (1.0 - delta)
    return eps, delta, m, a


def derive_params(n: int, d: int, epsilon: float, seed: int | None = 0,
                  jitter: bool = True) -> ApproxParams:
    """Parameters for the box search: ``delta = eps/(2d)``, ``m = ceil(1/delta)``,
    ``a = 1/(1 - delta)`` and ``k`` with ``a^(k-1) <= n + 1 < a^k``."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    eps, delta, m, a = _base_params(d, epsilon, seed, jitter)
    k = solve_ladder_length(float(n + 1), a)
    return ApproxParams(float(epsilon), eps, delta, m, a, k, _ladder(a, k), seed, jitter, BOX)


def enumerate_large_exponents(params: ApproxParams, d: int):
    """Exponent tuples in ``{0..k-1}^d`` with sum at least ``dk - k - d``, lexicographic."""
    k = params.k
    low = params.large_level(d)
    for y in itertools.product(range(k), repeat=d):
        if sum(y) >= low:
            yield y


def count_large_exponents(k: int, d: int) -> int:
    """Number of tuples ``enumerate_large_exponents`` yields, by counting the complement."""
    # substitute z = k - 1 - y: count z in {0..k-1}^d with sum(z) <= k
    total = 0
    for t in range(0, min(k, d * (k - 1)) + 1):
        # compositions of t into d parts each <= k-1 (inclusion-exclusion)
        c = 0
        for j in range(0, d + 1):
            rem = t - j * k
            if rem < 0:
                break
            c += (-1) ** j * math.comb(d, j) * math.comb(rem + d - 1, d - 1)
        total += c
    return total


@dataclass
class SearchResult:
    best_box: OpenBox
    volume: float
    exponents: tuple
    anchor: tuple
    params: ApproxParams
    stats: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "box": self.best_box.to_dict(),
            "volume": self.volume,
            "exponents": list(self.exponents),
            "anchor": list(self.anchor),
            "params": self.params.to_dict(),
            "stats": dict(self.stats),
        }


def _index_for(points, params: ApproxParams) -> PlacementIndex:
    pts = interior_points(points) if isinstance(points, PointSet) else points
    return PlacementIndex(pts, params.ladder, params.m)


def search_canonical_box(points: PointSet, y, params: ApproxParams) -> OpenBox | None:
    """Place the canonical box with exponents ``y`` on its grid.

    Builds cell, corner and window counts on the canonical grid and returns
    the lexicographically first anchor whose window of ``m`` cells per axis
    is empty and fully inside the unit cube, or None. Grids with more than
    ``DENSE_CELL_LIMIT`` cells are searched by the sparse candidate walk.
    """
    y = tuple(int(v) for v in y)
    if len(y) != points.dim:
        raise ValueError(f"need {points.dim} exponents, got {len(y)}")
    if any(not 0 <= v < params.k for v in y):
        raise ValueError(f"exponents must lie in 0..{params.k - 1}: {y}")
    pts = interior_points(points)
    grid = gridcount.GridSpec(tuple(params.ladder[v] / params.m for v in y))
    if grid.num_cells > DENSE_CELL_LIMIT:
        # the tensors would not fit in memory; the candidate walk gives the same anchor
        index = PlacementIndex(pts, params.ladder, params.m)
        anchor = index.free_anchor_sparse(y)
        return None if anchor is None else index.box(y, anchor)
    cells = gridcount.cell_counts(pts, grid)
    corner = gridcount.corner_counts(cells)
    Q = gridcount.all_box_counts(corner, (params.m,) * points.dim).values
    anchors = [gridcount.axis_anchor_count(c, params.m) for c in grid.cell_lengths]
    if min(anchors) <= 0:
        return None
    Q = Q[tuple(slice(0, a) for a in anchors)]
    free = np.flatnonzero(Q.ravel() == 0)
    if free.size == 0:
        return None
    anchor = np.unravel_index(free[0], Q.shape)
    c = grid.cell_lengths
    return OpenBox([j * ci for j, ci in zip(anchor, c)],
                   [(j + params.m) * ci for j, ci in zip(anchor, c)])


def _finish(index: PlacementIndex, hit, params: ApproxParams, counters, points: PointSet,
            started: float, extra: dict) -> SearchResult:
    box = index.box(hit.exponents, hit.anchor)
    # independent O(n d) check of the counting machinery's verdict
    if not is_empty(box, points):
        raise RuntimeError(f"placement {box} reported empty but contains an input point")
    stats = {
        "canonical_boxes_enumerated": counters.tests,
        "placements_tested": counters.placements,
        "max_placements_per_grid": counters.max_placements,
        "max_grid_cells": counters.max_cells,
        "elapsed": time.perf_counter() - started,
        "seed": params.seed,
        "epsilon_effective": params.epsilon_effective,
        "k": params.k,
        "m": params.m,
    }
    stats.update(extra)
    return SearchResult(box, box.volume(), hit.exponents, hit.anchor, params, stats)


def approx_max_empty_box(points: PointSet, epsilon: float, seed: int | None = 0,
                         jitter: bool = True, threads: int = 1,
                         strategy: str = "frontier", engine: str = "auto") -> SearchResult:
    """Empty box of volume at least ``(1 - epsilon)`` times the maximum.

    ``points`` must lie in the unit cube. The returned box maximizes volume
    over all large canonical boxes and grid placements; ties go to the
    lexicographically smallest exponent tuple, then anchor.

    ``strategy="exhaustive"`` tests every large canonical box;
    ``"frontier"`` (default) skips boxes that cannot beat the best found so
    far, using that feasibility is monotone in the exponents. Both return
    the same box. ``engine`` selects how a placement is decided (``"dense"``
    window counts, ``"sparse"`` candidate walk, or ``"auto"``); all agree.
    """
    started = time.perf_counter()
    d = points.dim
    params = derive_params(len(points), d, epsilon, seed, jitter)
    index = _index_for(points, params)
    low = params.large_level(d)
    below = False
    if strategy == "frontier":
        hit, counters = frontier_search(index, max(low, 0), threads, engine)
        if hit is None:
            # only reachable when points sit on grid hyperplanes; smaller
            # canonical boxes still give a valid empty box
            below = True
            hit, more = frontier_search(index, 0, threads, engine)
            counters.merge(more)
    elif strategy == "exhaustive":
        hit, counters = exhaustive_search(index, enumerate_large_exponents(params, d), engine)
        if hit is None:
            below = True
            hit, more = exhaustive_search(index, itertools.product(range(params.k), repeat=d), engine)
            counters.merge(more)
    else:
        raise ValueError(f"unknown strategy {strategy!r}")
    if hit is None:
        raise RuntimeError("no empty canonical placement found")
    return _finish(index, hit, params, counters, points, started,
                   {"below_large_level": below, "large_level": low})
