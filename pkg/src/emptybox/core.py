"""Geometric primitives: point sets, open boxes and per-axis normalization."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np


class EmptyBoxError(Exception):
    """Base class for errors raised by this package."""


class InputDomainError(EmptyBoxError, ValueError):
    """A point lies outside the region it is supposed to belong to."""


class DegenerateRegionError(EmptyBoxError, ValueError):
    """A box or region has zero (or negative) extent along some axis."""


class DimensionMismatchError(EmptyBoxError, ValueError):
    pass


class ScaleGuardError(EmptyBoxError, RuntimeError):
    """A brute-force routine refused an input larger than its scale guard."""


def _as_points_array(points, dim: int | None = None) -> np.ndarray:
    arr = np.asarray(points, dtype=np.float64)
    if arr.size == 0:
        if dim is None:
            if arr.ndim == 2:
                dim = arr.shape[1]
            else:
                raise DimensionMismatchError("cannot infer dimension of an empty point set")
        return np.zeros((0, dim), dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2:
        raise DimensionMismatchError(f"points must be a 2-d array, got shape {arr.shape}")
    if dim is not None and arr.shape[1] != dim:
        raise DimensionMismatchError(f"expected {dim} coordinates per point, got {arr.shape[1]}")
    return arr


@dataclass(frozen=True, eq=False)
class PointSet:
    """``n`` points in ``R^d`` stored as a read-only ``(n, d)`` float array.

    Duplicate points are kept and counted with multiplicity.
    """

    dim: int
    points: np.ndarray

    def __post_init__(self):
        if int(self.dim) < 1:
            raise DimensionMismatchError(f"dimension must be >= 1, got {self.dim}")
        arr = np.array(_as_points_array(self.points, int(self.dim)), dtype=np.float64, copy=True)
        if not np.all(np.isfinite(arr)):
            raise InputDomainError("point coordinates must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "dim", int(self.dim))
        object.__setattr__(self, "points", arr)

    @classmethod
    def from_points(cls, points: Iterable[Sequence[float]], dim: int | None = None) -> "PointSet":
        arr = _as_points_array(list(points) if not isinstance(points, np.ndarray) else points, dim)
        return cls(arr.shape[1], arr)

    def __len__(self) -> int:
        return self.points.shape[0]

    def __iter__(self):
        return iter(self.points)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PointSet):
            return NotImplemented
        return self.dim == other.dim and np.array_equal(self.points, other.points)

    def __hash__(self):
        return hash((self.dim, self.points.tobytes()))

    def tolist(self) -> list[list[float]]:
        return self.points.tolist()

    def unique(self) -> "PointSet":
        """Drop duplicate points, keeping first occurrences in order."""
        if len(self) == 0:
            return self
        _, idx = np.unique(self.points, axis=0, return_index=True)
        return PointSet(self.dim, self.points[np.sort(idx)])

    def __repr__(self) -> str:
        return f"PointSet(dim={self.dim}, n={len(self)})"


@dataclass(frozen=True)
class OpenBox:
    """Open axis-parallel box ``(lo[0], hi[0]) x ... x (lo[d-1], hi[d-1])``."""

    lo: tuple
    hi: tuple

    def __post_init__(self):
        lo = tuple(float(v) for v in np.ravel(self.lo))
        hi = tuple(float(v) for v in np.ravel(self.hi))
        if len(lo) != len(hi) or len(lo) == 0:
            raise DimensionMismatchError(f"lo/hi lengths differ or are empty: {len(lo)} vs {len(hi)}")
        if not all(np.isfinite(lo)) or not all(np.isfinite(hi)):
            raise DegenerateRegionError("box coordinates must be finite")
        for i, (a, b) in enumerate(zip(lo, hi)):
            if not a < b:
                raise DegenerateRegionError(f"box has no interior along axis {i}: ({a}, {b})")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def unit(cls, dim: int) -> "OpenBox":
        return cls((0.0,) * dim, (1.0,) * dim)

    @property
    def dim(self) -> int:
        return len(self.lo)

    @property
    def sides(self) -> tuple:
        return tuple(b - a for a, b in zip(self.lo, self.hi))

    def volume(self) -> float:
        return volume(self)

    def contains_point(self, p) -> bool:
        return contains_point_strict(self, p)

    def within(self, other: "OpenBox") -> bool:
        """True if this box is contained in the closure of ``other``."""
        return all(a >= c and b <= d for a, b, c, d in zip(self.lo, self.hi, other.lo, other.hi))

    def to_dict(self) -> dict:
        return {"lo": list(self.lo), "hi": list(self.hi)}


def volume(box: OpenBox) -> float:
    v = 1.0
    for a, b in zip(box.lo, box.hi):
        v *= b - a
    return v


def contains_point_strict(box: OpenBox, p) -> bool:
    """Strict containment; a point on the boundary is not inside the open box."""
    p = np.ravel(np.asarray(p, dtype=np.float64))
    if p.shape[0] != box.dim:
        raise DimensionMismatchError(f"point has {p.shape[0]} coordinates, box has {box.dim}")
    return all(a < x < b for a, x, b in zip(box.lo, p, box.hi))


def points_in_box(box: OpenBox, points) -> np.ndarray:
    """Boolean mask of points strictly inside ``box``."""
    arr = points.points if isinstance(points, PointSet) else _as_points_array(points, box.dim)
    if arr.shape[1] != box.dim:
        raise DimensionMismatchError(f"points have {arr.shape[1]} coordinates, box has {box.dim}")
    lo = np.asarray(box.lo)
    hi = np.asarray(box.hi)
    return np.all((arr > lo) & (arr < hi), axis=1)


def is_empty(box: OpenBox, points) -> bool:
    return not bool(np.any(points_in_box(box, points)))


@dataclass(frozen=True)
class AffineTransform:
    """Per-axis map ``x -> (x - offset) * scale`` onto the unit cube.

    ``scale[i]`` is ``1 / extent[i]``; the forward map divides by the extent
    so that region corners land exactly on 0 and 1.
    """

    scale: tuple
    offset: tuple

    def __post_init__(self):
        scale = tuple(float(s) for s in self.scale)
        offset = tuple(float(o) for o in self.offset)
        if len(scale) != len(offset):
            raise DimensionMismatchError("scale and offset lengths differ")
        if not all(s > 0 and np.isfinite(s) for s in scale):
            raise DegenerateRegionError(f"scale factors must be positive and finite: {scale}")
        object.__setattr__(self, "scale", scale)
        object.__setattr__(self, "offset", offset)

    @classmethod
    def from_region(cls, region: OpenBox) -> "AffineTransform":
        ext = [b - a for a, b in zip(region.lo, region.hi)]
        return cls(tuple(1.0 / e for e in ext), region.lo)

    @classmethod
    def identity(cls, dim: int) -> "AffineTransform":
        return cls((1.0,) * dim, (0.0,) * dim)

    @property
    def dim(self) -> int:
        return len(self.scale)

    @property
    def extent(self) -> np.ndarray:
        return 1.0 / np.asarray(self.scale)

    def apply(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        return (x - np.asarray(self.offset)) / self.extent

    def invert(self, y) -> np.ndarray:
        y = np.asarray(y, dtype=np.float64)
        return y * self.extent + np.asarray(self.offset)

    def apply_box(self, box: OpenBox) -> OpenBox:
        return OpenBox(self.apply(box.lo), self.apply(box.hi))

    def invert_box(self, box: OpenBox) -> OpenBox:
        return OpenBox(self.invert(box.lo), self.invert(box.hi))

    def volume_factor(self) -> float:
        return float(np.prod(self.extent))

    def to_dict(self) -> dict:
        return {"scale": list(self.scale), "offset": list(self.offset)}


def normalize_to_unit(points: PointSet, region: OpenBox) -> tuple[PointSet, AffineTransform]:
    """Map ``points`` inside ``region`` to the unit cube.

    Points that land on the boundary of the unit cube are dropped: they can
    never lie inside an open box contained in the cube.
    """
    if points.dim != region.dim:
        raise DimensionMismatchError(f"points are {points.dim}-d, region is {region.dim}-d")
    lo = np.asarray(region.lo)
    hi = np.asarray(region.hi)
    arr = points.points
    outside = np.any((arr < lo) | (arr > hi), axis=1)
    if np.any(outside):
        bad = int(np.flatnonzero(outside)[0])
        raise InputDomainError(f"point {bad} {arr[bad].tolist()} lies outside the region")
    if np.all(lo == 0.0) and np.all(hi == 1.0):
        tr = AffineTransform.identity(region.dim)
        mapped = arr.copy()
    else:
        tr = AffineTransform.from_region(region)
        mapped = tr.apply(arr)
    on_boundary = np.any((arr == lo) | (arr == hi), axis=1)
    mapped = np.clip(mapped[~on_boundary], 0.0, 1.0)
    # rounding can still push an interior point onto the cube boundary
    keep = np.all((mapped > 0.0) & (mapped < 1.0), axis=1)
    return PointSet(points.dim, mapped[keep]), tr


def bounding_region(points: PointSet, pad: float = 0.01) -> OpenBox:
    """Bounding box of ``points`` expanded by ``pad`` times the extent per axis."""
    if len(points) == 0:
        return OpenBox.unit(points.dim)
    lo = points.points.min(axis=0)
    hi = points.points.max(axis=0)
    ext = hi - lo
    widen = np.where(ext > 0, ext * pad, np.maximum(np.abs(lo), 1.0) * pad)
    return OpenBox(lo - widen, hi + widen)
