"""Grid bucketing, corner (prefix) counts and window counts.

A grid with cell lengths ``x_1..x_d`` is anchored at the origin of the unit
cube; cells are half-open ``[j*x, (j+1)*x)`` along every axis and the last cell
on an axis may be clipped by the cube boundary.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core import DimensionMismatchError, InputDomainError, PointSet

CELL = "cell"
CORNER = "corner"
WINDOW = "window"


def axis_extent(cell_length: float) -> int:
    """Number of cells with nonempty interior covering ``[0, 1]``.

    The smallest ``E`` with ``E * cell_length >= 1`` in floating point.
    """
    if not cell_length > 0:
        raise ValueError(f"cell length must be positive, got {cell_length}")
    e = max(1, math.ceil(1.0 / cell_length))
    while e > 1 and (e - 1) * cell_length >= 1.0:
        e -= 1
    while e * cell_length < 1.0:
        e += 1
    return e


def axis_anchor_count(cell_length: float, window: int) -> int:
    """Grid anchors ``j >= 0`` whose window of ``window`` cells fits in ``[0, 1]``.

    Counted with the same product ``(j + window) * cell_length`` used to
    report box corners, so every counted anchor yields a box with ``hi <= 1``.
    """
    j = math.floor(1.0 / cell_length) - window
    while j >= 0 and (j + window) * cell_length > 1.0:
        j -= 1
    while (j + 1 + window) * cell_length <= 1.0:
        j += 1
    return max(j + 1, 0)


def cell_index(coords, cell_length: float, extent: int) -> np.ndarray:
    """Cell index ``q`` per coordinate with ``q * x <= c < (q + 1) * x`` in floating point.

    The floor of ``c / x`` is corrected by one step either way so that it
    agrees with the products used for box corners; indices landing at
    ``extent`` (coordinate 1) are clamped into the last cell.
    """
    c = np.asarray(coords, dtype=np.float64)
    q = np.floor(c / cell_length).astype(np.int64)
    q -= (q * cell_length > c)
    q += ((q + 1) * cell_length <= c)
    return np.clip(q, 0, extent - 1)


@dataclass(frozen=True)
class GridSpec:
    """Grid anchored at the origin with the given cell length per axis."""

    cell_lengths: tuple

    def __post_init__(self):
        cl = tuple(float(x) for x in self.cell_lengths)
        if not cl:
            raise DimensionMismatchError("grid needs at least one axis")
        if not all(x > 0 and math.isfinite(x) for x in cl):
            raise ValueError(f"cell lengths must be positive: {cl}")
        object.__setattr__(self, "cell_lengths", cl)

    @property
    def dim(self) -> int:
        return len(self.cell_lengths)

    @property
    def extents(self) -> tuple:
        return tuple(axis_extent(x) for x in self.cell_lengths)

    @property
    def num_cells(self) -> int:
        return math.prod(self.extents)

    def indices(self, points) -> np.ndarray:
        arr = points.points if isinstance(points, PointSet) else np.asarray(points, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[1] != self.dim:
            raise DimensionMismatchError(f"points must have shape (n, {self.dim})")
        ext = self.extents
        out = np.empty(arr.shape, dtype=np.int64)
        for i, (x, e) in enumerate(zip(self.cell_lengths, ext)):
            out[:, i] = cell_index(arr[:, i], x, e)
        return out


@dataclass(frozen=True, eq=False)
class CountTensor:
    values: np.ndarray
    kind: str
    # counters for the complexity guard; not part of the tensor's identity
    ops: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def shape(self) -> tuple:
        return self.values.shape

    def __getitem__(self, idx):
        return int(self.values[idx])


def cell_counts(points, grid: GridSpec) -> CountTensor:
    """Number of points per grid cell (point ``p`` lands in ``floor(p / x)``)."""
    arr = points.points if isinstance(points, PointSet) else np.asarray(points, dtype=np.float64)
    if arr.size and (arr.ndim != 2 or arr.shape[1] != grid.dim):
        raise DimensionMismatchError(f"points must have shape (n, {grid.dim})")
    arr = arr.reshape(-1, grid.dim)
    if np.any((arr < 0.0) | (arr > 1.0)):
        raise InputDomainError("cell_counts needs points inside the unit cube")
    shape = grid.extents
    if len(arr) == 0:
        return CountTensor(np.zeros(shape, dtype=np.int64), CELL, {"point_visits": 0})
    idx = grid.indices(arr)
    flat = np.ravel_multi_index(tuple(idx.T), shape)
    values = np.bincount(flat, minlength=math.prod(shape)).reshape(shape).astype(np.int64)
    return CountTensor(values, CELL, {"point_visits": len(arr)})


def cell_counts_from_indices(idx: np.ndarray, shape: Sequence[int]) -> np.ndarray:
    if len(idx) == 0:
        return np.zeros(tuple(shape), dtype=np.int64)
    flat = np.ravel_multi_index(tuple(np.asarray(idx).T), tuple(shape))
    return np.bincount(flat, minlength=math.prod(shape)).reshape(tuple(shape)).astype(np.int64)


def corner_counts(cells: CountTensor) -> CountTensor:
    """Corner-box numbers ``N(i) = sum of n(j) over 0 <= j <= i``.

    Evaluated as one running sum per axis, which equals the signed
    ``2^d``-term recurrence but reads each cell only ``d`` times.
    """
    if cells.kind != CELL:
        raise ValueError(f"corner_counts needs a cell tensor, got {cells.kind!r}")
    values = cells.values
    for axis in range(values.ndim):
        values = np.cumsum(values, axis=axis)
    return CountTensor(values, CORNER, {"reads_per_cell": cells.values.ndim})


def _corner_terms(d: int):
    """Sign and offset mask for each corner of the inclusion-exclusion."""
    for b in itertools.product((0, 1), repeat=d):
        yield (-1) ** sum(b), b


def box_count(corner: CountTensor, lower_cell: Sequence[int], sizes: Sequence[int]) -> int:
    """Points in the block of cells ``[lower_cell, lower_cell + sizes)``, from ``2^d`` corner values."""
    if corner.kind != CORNER:
        raise ValueError(f"box_count needs a corner tensor, got {corner.kind!r}")
    N = corner.values
    d = N.ndim
    lower = [int(v) for v in lower_cell]
    sizes = [int(v) for v in sizes]
    if len(lower) != d or len(sizes) != d:
        raise DimensionMismatchError(f"window must have {d} components")
    for i in range(d):
        if sizes[i] < 1 or lower[i] < 0 or lower[i] + sizes[i] > N.shape[i]:
            raise IndexError(f"window {lower}+{sizes} out of range for shape {N.shape}")
    upper = [l + s - 1 for l, s in zip(lower, sizes)]
    total = 0
    for sign, b in _corner_terms(d):
        idx = tuple(u - bi * s for u, bi, s in zip(upper, b, sizes))
        if min(idx) >= 0:
            total += sign * int(N[idx])
    return total


def all_box_counts(corner: CountTensor, sizes: Sequence[int]) -> CountTensor:
    """Window counts ``Q(i)`` for every anchor cell whose window fits in the tensor."""
    if corner.kind != CORNER:
        raise ValueError(f"all_box_counts needs a corner tensor, got {corner.kind!r}")
    N = corner.values
    d = N.ndim
    sizes = tuple(int(s) for s in sizes)
    if len(sizes) != d or any(s < 1 for s in sizes):
        raise ValueError(f"window sizes must be {d} positive integers, got {sizes}")
    out_shape = tuple(e - s + 1 for e, s in zip(N.shape, sizes))
    if any(e <= 0 for e in out_shape):
        return CountTensor(np.zeros(tuple(max(e, 0) for e in out_shape), dtype=np.int64), WINDOW)
    # one leading zero per axis stands in for N at index -1
    P = np.pad(N, [(1, 0)] * d)
    Q = np.zeros(out_shape, dtype=np.int64)
    for sign, b in _corner_terms(d):
        # corner of the window at offset upper - b*size, shifted by the pad
        sl = tuple(
            slice(s - bi * s, s - bi * s + e) for s, bi, e in zip(sizes, b, out_shape)
        )
        Q += sign * P[sl]
    return CountTensor(Q, WINDOW, {"reads_per_cell": 2 ** d})
