"""Exact brute-force references for small inputs.

Every maximal empty box has each face either on the region boundary or
touching an input point, so enumerating boxes whose faces lie on the
per-axis candidate coordinates ``{region bounds} + {point coordinates}``
finds the optimum.
"""

from __future__ import annotations

import bisect
import heapq
import logging
import math

import numpy as np

from .core import DimensionMismatchError, OpenBox, PointSet, ScaleGuardError, is_empty

log = logging.getLogger(__name__)

# (max d, max n) pairs accepted without force=True
DEFAULT_GUARDS = ((3, 12), (4, 6))


def within_guard(n: int, d: int, guards=DEFAULT_GUARDS) -> bool:
    return any(d <= gd and n <= gn for gd, gn in guards)


def _guard(n: int, d: int, force: bool, guards, what: str) -> None:
    if within_guard(n, d, guards):
        return
    # candidate pairs per axis, times a point scan per box
    estimate = (math.comb(n + 2, 2) ** d) * max(n, 1)
    if not force:
        raise ScaleGuardError(
            f"{what}: n={n}, d={d} exceeds the brute-force scale guard "
            f"(~{estimate:.3g} box checks); pass force=True (--force) to run anyway"
        )
    log.warning("%s: forced run at n=%d, d=%d, roughly %.3g box checks", what, n, d, estimate)


def candidate_coordinates(points: PointSet, region: OpenBox | None = None) -> list[np.ndarray]:
    """Per axis: sorted unique ``{region lo, region hi}`` plus point coordinates within the region."""
    region = region or OpenBox.unit(points.dim)
    arr = points.points
    out = []
    for i in range(points.dim):
        vals = arr[:, i]
        vals = vals[(vals >= region.lo[i]) & (vals <= region.hi[i])]
        out.append(np.unique(np.concatenate([[region.lo[i], region.hi[i]], vals])))
    return out


def _region_points(points: PointSet, region: OpenBox) -> np.ndarray:
    arr = points.points
    lo = np.asarray(region.lo)
    hi = np.asarray(region.hi)
    return arr[np.all((arr > lo) & (arr < hi), axis=1)]


def exact_max_empty_box(points: PointSet, region: OpenBox | None = None, force: bool = False,
                        guards=DEFAULT_GUARDS) -> tuple[OpenBox, float]:
    """Maximum-volume empty open box in ``region`` (unit cube by default).

    Chooses a candidate interval on every axis but the last, keeping only the
    points strictly inside the slab so far; on the last axis the best choice
    is the widest gap between consecutive remaining coordinates.
    """
    d = points.dim
    region = region or OpenBox.unit(d)
    _guard(len(points), d, force, guards, "exact_max_empty_box")
    cands = candidate_coordinates(points, region)
    inside = _region_points(points, region)
    best_vol = -1.0
    best_box = None
    lo = [0.0] * d
    hi = [0.0] * d

    def rec(axis: int, pts: np.ndarray, partial: float):
        nonlocal best_vol, best_box
        if axis == d - 1:
            ys = np.unique(np.concatenate([[region.lo[axis], region.hi[axis]], pts[:, axis]]))
            gaps = np.diff(ys)
            j = int(np.argmax(gaps))
            vol = partial * float(gaps[j])
            if vol > best_vol:
                best_vol = vol
                lo[axis], hi[axis] = float(ys[j]), float(ys[j + 1])
                best_box = (tuple(lo), tuple(hi))
            return
        remaining = float(np.prod([region.hi[t] - region.lo[t] for t in range(axis + 1, d)]))
        c = cands[axis]
        for a in range(len(c) - 1):
            for b in range(a + 1, len(c)):
                w = float(c[b] - c[a])
                if partial * w * remaining <= best_vol:
                    continue
                sub = pts[(pts[:, axis] > c[a]) & (pts[:, axis] < c[b])]
                lo[axis], hi[axis] = float(c[a]), float(c[b])
                rec(axis + 1, sub, partial * w)

    rec(0, inside, 1.0)
    box = OpenBox(*best_box)
    return box, box.volume()


def exact_max_empty_rect_2d(points: PointSet, region: OpenBox | None = None) -> tuple[OpenBox, float]:
    """Planar maximum empty rectangle in ``O(n^2 log n)``.

    For each left edge, sweeps the right edge to the right, inserting points
    that fall strictly inside the strip; the largest vertical gap is kept in
    a lazy max-heap since insertions only split gaps.
    """
    if points.dim != 2:
        raise DimensionMismatchError(f"exact_max_empty_rect_2d needs d = 2, got {points.dim}")
    region = region or OpenBox.unit(2)
    pts = _region_points(points, region)
    xs = np.unique(np.concatenate([[region.lo[0], region.hi[0]], pts[:, 0]]))
    order = np.argsort(pts[:, 0], kind="stable")
    px = pts[order, 0].tolist()
    py = pts[order, 1].tolist()
    y0, y1 = region.lo[1], region.hi[1]
    best = (-1.0, None)
    for a in range(len(xs) - 1):
        left = float(xs[a])
        ys = [y0, y1]
        heap = [(-(y1 - y0), y0, y1)]
        start = bisect.bisect_right(px, left)
        p = start
        for b in range(a + 1, len(xs)):
            right = float(xs[b])
            # points with left < x < right
            while p < len(px) and px[p] < right:
                y = py[p]
                p += 1
                pos = bisect.bisect_left(ys, y)
                if pos < len(ys) and ys[pos] == y:
                    continue
                lo_y, hi_y = ys[pos - 1], ys[pos]
                ys.insert(pos, y)
                heapq.heappush(heap, (-(y - lo_y), lo_y, y))
                heapq.heappush(heap, (-(hi_y - y), y, hi_y))
            while True:
                g, lo_y, hi_y = heap[0]
                i = bisect.bisect_left(ys, lo_y)
                if i + 1 < len(ys) and ys[i] == lo_y and ys[i + 1] == hi_y:
                    break
                heapq.heappop(heap)
            area = (right - left) * (-g)
            if area > best[0]:
                best = (area, ((left, lo_y), (right, hi_y)))
    box = OpenBox(*best[1])
    return box, box.volume()


def is_maximal_empty(box: OpenBox, points: PointSet, region: OpenBox) -> bool:
    """Empty, and no face can be pushed outward.

    A face is blocked if it lies on the region boundary or some point sits
    on it strictly inside the face (corner or edge contact does not block).
    """
    if box.dim != points.dim or region.dim != points.dim:
        raise DimensionMismatchError("box, points and region must share a dimension")
    if not is_empty(box, points):
        return False
    arr = points.points
    lo = np.asarray(box.lo)
    hi = np.asarray(box.hi)
    inner = (arr > lo) & (arr < hi)
    for i in range(box.dim):
        others = np.all(np.delete(inner, i, axis=1), axis=1) if box.dim > 1 else np.ones(len(arr), bool)
        for face, bound in ((box.lo[i], region.lo[i]), (box.hi[i], region.hi[i])):
            if face == bound:
                continue
            if not np.any(others & (arr[:, i] == face)):
                return False
    return True


def enumerate_restricted_boxes(points: PointSet, region: OpenBox | None = None,
                               force: bool = False, guards=DEFAULT_GUARDS) -> list[OpenBox]:
    """All maximal empty boxes in ``region``, sorted by coordinates.

    Faces range over the candidate coordinates; on the last axis only
    consecutive coordinates of the points left in the slab can bound an
    empty box, and each survivor is checked with ``is_maximal_empty``.
    """
    d = points.dim
    region = region or OpenBox.unit(d)
    _guard(len(points), d, force, guards, "enumerate_restricted_boxes")
    cands = candidate_coordinates(points, region)
    inside = _region_points(points, region)
    found = set()
    lo = [0.0] * d
    hi = [0.0] * d

    def rec(axis: int, pts: np.ndarray):
        if axis == d - 1:
            ys = np.unique(np.concatenate([[region.lo[axis], region.hi[axis]], pts[:, axis]]))
            for j in range(len(ys) - 1):
                lo[axis], hi[axis] = float(ys[j]), float(ys[j + 1])
                key = (tuple(lo), tuple(hi))
                if key in found:
                    continue
                if is_maximal_empty(OpenBox(*key), points, region):
                    found.add(key)
            return
        c = cands[axis]
        for a in range(len(c) - 1):
            for b in range(a + 1, len(c)):
                sub = pts[(pts[:, axis] > c[a]) & (pts[:, axis] < c[b])]
                lo[axis], hi[axis] = float(c[a]), float(c[b])
                rec(axis + 1, sub)

    rec(0, inside)
    return [OpenBox(l, h) for l, h in sorted(found)]


def exact_max_empty_cube(points: PointSet, force: bool = False,
                         guards=DEFAULT_GUARDS) -> tuple[OpenBox, float]:
    """Largest empty hypercube in the unit cube.

    Any empty hypercube extends to a maximal empty box, and the largest cube
    inside a box has side equal to the box's shortest side. So the answer is
    the largest shortest side over empty candidate boxes, searched like
    ``exact_max_empty_box`` but pruning on the shortest side so far.
    """
    d = points.dim
    region = OpenBox.unit(d)
    _guard(len(points), d, force, guards, "exact_max_empty_cube")
    cands = candidate_coordinates(points, region)
    inside = _region_points(points, region)
    best_side = -1.0
    best_lo = None
    lo = [0.0] * d

    def rec(axis: int, pts: np.ndarray, side: float):
        nonlocal best_side, best_lo
        if axis == d - 1:
            ys = np.unique(np.concatenate([[0.0, 1.0], pts[:, axis]]))
            gaps = np.diff(ys)
            j = int(np.argmax(gaps))
            s = min(side, float(gaps[j]))
            if s > best_side:
                best_side = s
                lo[axis] = float(ys[j])
                best_lo = tuple(lo)
            return
        c = cands[axis]
        for a in range(len(c) - 1):
            for b in range(a + 1, len(c)):
                w = float(c[b] - c[a])
                if min(side, w) <= best_side:
                    continue
                sub = pts[(pts[:, axis] > c[a]) & (pts[:, axis] < c[b])]
                lo[axis] = float(c[a])
                rec(axis + 1, sub, min(side, w))

    rec(0, inside, 1.0)
    cube = OpenBox(best_lo, tuple(v + best_side for v in best_lo))
    return cube, best_side ** d
