"""(1 - eps)-approximation of the maximum-volume empty hypercube.

Same canonical grids as the box search, but only the ``k`` diagonal
exponent tuples ``(i, ..., i)`` are candidates, with ``k`` chosen from the
hypercube volume lower bound ``(n^(1/d) + 1)^(-d)``.
"""

from __future__ import annotations

import time

from ._search import Counters, Hit, PlacementIndex, interior_points
from .approx_box import (
    CUBE,
    ApproxParams,
    SearchResult,
    _base_params,
    _finish,
    _ladder,
    solve_ladder_length,
)
from .core import PointSet


def derive_cube_params(n: int, d: int, epsilon: float, seed: int | None = 0,
                       jitter: bool = True) -> ApproxParams:
    """As ``derive_params`` but with ``a^(k-1) <= n^(1/d) + 1 < a^k``."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    eps, delta, m, a = _base_params(d, epsilon, seed, jitter)
    k = solve_ladder_length(n ** (1.0 / d) + 1.0, a)
    return ApproxParams(float(epsilon), eps, delta, m, a, k, _ladder(a, k), seed, jitter, CUBE)


def approx_max_empty_cube(points: PointSet, epsilon: float, seed: int | None = 0,
                          jitter: bool = True, engine: str = "auto") -> SearchResult:
    """Empty hypercube of volume at least ``(1 - epsilon)`` times the largest one.

    Canonical cubes are tried from the largest side down; the first with an
    empty placement wins, since every later cube is strictly smaller.
    """
    started = time.perf_counter()
    d = points.dim
    params = derive_cube_params(len(points), d, epsilon, seed, jitter)
    index = PlacementIndex(interior_points(points), params.ladder, params.m)
    counters = Counters()
    hit = None
    for i in range(params.k - 1, -1, -1):
        y = (i,) * d
        index.count(y, counters)
        anchor = index.free_anchor(y, engine)
        if anchor is not None:
            hit = Hit(y, anchor)
            break
    if hit is None:
        raise RuntimeError("no empty canonical hypercube placement found")
    return _finish(index, hit, params, counters, points, started, {"ladder_size": params.k})
