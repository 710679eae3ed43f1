"""Point-set constructions: low-discrepancy sets, lower-bound constructions,
tight small configurations and seeded uniform samples."""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

import numpy as np

from .core import DegenerateRegionError, PointSet

XI = (3.0 - math.sqrt(5.0)) / 2.0

TIGHT_CONFIGS = ("two_point_xi", "four_point_quarter")


def first_primes(count: int) -> list[int]:
    """The first ``count`` primes, by incremental trial division."""
    primes: list[int] = []
    cand = 2
    while len(primes) < count:
        if all(cand % p for p in primes if p * p <= cand):
            primes.append(cand)
        cand += 1
    return primes


def radical_inverse(k: int, base: int) -> float:
    """Mirror the base-``base`` digits of ``k`` across the radix point.

    Accumulated exactly as an integer numerator over ``base**j`` and rounded once.
    """
    if k < 0:
        raise ValueError("radical inverse needs a nonnegative integer")
    num, den = 0, 1
    while k:
        k, digit = divmod(k, base)
        num = num * base + digit
        den *= base
    return float(Fraction(num, den))


def van_der_corput(n: int) -> PointSet:
    """Planar van der Corput set ``(k/n, radical_inverse(k, 2))``, ``0 <= k < n``."""
    return halton_hammersley(n, 2)


def halton_hammersley(n: int, d: int) -> PointSet:
    """Halton-Hammersley set: ``k/n`` on axis 0, base-``p_i`` radical inverses after."""
    if d < 2:
        raise ValueError(f"Halton-Hammersley construction needs d >= 2, got {d}")
    if n < 0:
        raise ValueError("n must be nonnegative")
    primes = first_primes(d - 1)
    pts = np.empty((n, d), dtype=np.float64)
    for k in range(n):
        pts[k, 0] = float(Fraction(k, n))
        for i, p in enumerate(primes, start=1):
            pts[k, i] = radical_inverse(k, p)
    return PointSet(d, pts)


def restricted_lb_construction(d: int, counts: Sequence[int]) -> PointSet:
    """Points in ``R^d`` with at least ``prod(n_i - 1)`` maximal empty boxes.

    Axis ``i`` is paired with ``j = (i + 1) mod d``; group ``i`` holds the
    points ``k e_i - (n_i + 1 - k) e_j`` for ``k = 1..n_i``.
    """
    counts = [int(c) for c in counts]
    if d < 2:
        raise ValueError(f"construction needs d >= 2, got {d}")
    if len(counts) != d:
        raise ValueError(f"need {d} group sizes, got {len(counts)}")
    if any(c < 2 for c in counts):
        raise ValueError(f"every group needs at least 2 points, got {counts}")
    rows = []
    for i, ni in enumerate(counts):
        j = (i + 1) % d
        for k in range(1, ni + 1):
            p = [0.0] * d
            p[i] = float(k)
            p[j] = -float(ni + 1 - k)
            rows.append(p)
    return PointSet(d, np.array(rows))


def embed_in_unit_cube(points: PointSet, margin: float | None = None) -> PointSet:
    """Per-axis affine map of the bounding box onto ``[margin, 1 - margin]^d``."""
    n = len(points)
    if n == 0:
        raise ValueError("cannot embed an empty point set")
    if margin is None:
        margin = 1.0 / (2 * (n + 1))
    if not 0.0 < margin < 0.5:
        raise ValueError(f"margin must lie in (0, 0.5), got {margin}")
    lo = points.points.min(axis=0)
    hi = points.points.max(axis=0)
    ext = hi - lo
    if np.any(ext <= 0):
        axis = int(np.flatnonzero(ext <= 0)[0])
        raise DegenerateRegionError(f"points have zero extent along axis {axis}")
    out = margin + (points.points - lo) / ext * (1.0 - 2.0 * margin)
    return PointSet(points.dim, out)


def grid_vertices(k: int, d: int) -> PointSet:
    """The ``k^d`` interior vertices of the uniform ``(k+1)^d`` grid on the unit cube."""
    if k < 1:
        raise ValueError("k must be positive")
    ticks = np.arange(1, k + 1, dtype=np.float64) / (k + 1)
    mesh = np.meshgrid(*([ticks] * d), indexing="ij")
    return PointSet(d, np.stack([g.ravel() for g in mesh], axis=1))


def known_tight_configs(name: str) -> PointSet:
    if name == "two_point_xi":
        return PointSet(2, [[XI, 1.0 - XI], [1.0 - XI, XI]])
    if name == "four_point_quarter":
        return PointSet(2, [[0.25, 0.5], [0.5, 0.25], [0.5, 0.75], [0.75, 0.5]])
    raise ValueError(f"unknown configuration {name!r}; expected one of {TIGHT_CONFIGS}")


def uniform_random(n: int, d: int, seed: int = 0) -> PointSet:
    """``n`` i.i.d. uniform points in the open cube ``(0,1)^d``.

    Uses numpy's PCG64 generator (``numpy.random.default_rng(seed)``); exact
    zeros, which the generator can emit, are redrawn.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    rng = np.random.default_rng(seed)
    pts = rng.random((n, d))
    zeros = pts == 0.0
    while np.any(zeros):
        pts[zeros] = rng.random(int(zeros.sum()))
        zeros = pts == 0.0
    return PointSet(d, pts)
