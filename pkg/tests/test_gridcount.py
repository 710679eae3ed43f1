import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from emptybox import gridcount
from emptybox.core import InputDomainError, PointSet
from emptybox.gridcount import GridSpec, all_box_counts, box_count, cell_counts, corner_counts

TWO = PointSet.from_points([(0.25, 0.25), (0.75, 0.75)])
HALF = GridSpec((0.5, 0.5))


def signed_recurrence(n: np.ndarray) -> np.ndarray:
    """Corner numbers by the 2^d-term inclusion-exclusion, one cell at a time."""
    N = np.zeros_like(n)
    d = n.ndim
    for idx in itertools.product(*(range(e) for e in n.shape)):
        total = int(n[idx])
        for b in itertools.product((0, 1), repeat=d):
            if not any(b):
                continue
            prev = tuple(i - bi for i, bi in zip(idx, b))
            if min(prev) < 0:
                continue
            total += (-1) ** (sum(b) + 1) * int(N[prev])
        N[idx] = total
    return N


def naive_window(points: np.ndarray, cell: tuple, lower, sizes) -> int:
    lo = np.array([j * x for j, x in zip(lower, cell)])
    hi = np.array([(j + s) * x for j, s, x in zip(lower, sizes, cell)])
    return int(np.count_nonzero(np.all((points >= lo) & (points < hi), axis=1)))


def test_cell_counts_examples():
    c = cell_counts(TWO, HALF)
    assert c.values.tolist() == [[1, 0], [0, 1]]
    assert cell_counts(PointSet(2, np.zeros((0, 2))), HALF).values.tolist() == [[0, 0], [0, 0]]
    # half-open cells: the centre belongs to the upper cell
    assert cell_counts(PointSet.from_points([(0.5, 0.5)]), HALF)[1, 1] == 1
    with pytest.raises(InputDomainError):
        cell_counts(PointSet.from_points([(1.5, 0.5)]), HALF)


def test_corner_counts_examples():
    N = corner_counts(cell_counts(TWO, HALF))
    assert N[1, 1] == 2 and N[0, 0] == 1 and N[0, 1] == 1 and N[1, 0] == 1
    zeros = corner_counts(cell_counts(PointSet(2, np.zeros((0, 2))), HALF))
    assert not zeros.values.any()
    single = corner_counts(cell_counts(TWO, GridSpec((1.0, 1.0))))
    assert single.values.tolist() == [[2]]
    with pytest.raises(ValueError):
        corner_counts(N)


def test_box_count_examples():
    N = corner_counts(cell_counts(TWO, HALF))
    assert box_count(N, (0, 1), (1, 1)) == 0
    assert box_count(N, (0, 0), (2, 2)) == 2
    zero = corner_counts(cell_counts(PointSet(2, np.zeros((0, 2))), HALF))
    assert box_count(zero, (1, 0), (1, 2)) == 0
    with pytest.raises(IndexError):
        box_count(N, (1, 1), (2, 1))


def test_all_box_counts_examples():
    cells = cell_counts(TWO, GridSpec((0.25, 0.25)))
    N = corner_counts(cells)
    np.testing.assert_array_equal(all_box_counts(N, (1, 1)).values, cells.values)
    full = all_box_counts(N, N.shape).values
    assert full.shape == (1, 1) and full[0, 0] == 2


def test_extents_and_clamping():
    assert GridSpec((0.3, 0.5, 1.0)).extents == (4, 2, 1)
    assert GridSpec((0.1,)).extents == (10,)
    # coordinate 1 lands in the last cell
    assert gridcount.cell_index([1.0], 0.25, 4).tolist() == [3]
    assert gridcount.axis_anchor_count(0.1, 3) == 8


def test_operation_counters():
    pts = PointSet(3, np.random.default_rng(0).random((40, 3)))
    cells = cell_counts(pts, GridSpec((0.2, 0.3, 0.25)))
    assert cells.ops["point_visits"] == 40
    N = corner_counts(cells)
    assert N.ops["reads_per_cell"] <= 2 ** 3


grids = st.integers(2, 4).flatmap(
    lambda d: st.tuples(
        hnp.arrays(np.float64, st.tuples(st.integers(0, 50), st.just(d)),
                   elements=st.floats(0, 1, exclude_max=True)),
        st.lists(st.floats(0.12, 1.0), min_size=d, max_size=d),
        st.lists(st.integers(1, 4), min_size=d, max_size=d),
    )
)


@settings(max_examples=60)
@given(grids)
def test_window_counts_match_naive(case):
    arr, cell, sizes = case
    grid = GridSpec(tuple(cell))
    cells = cell_counts(arr, grid)
    assert cells.values.sum() == len(arr)
    N = corner_counts(cells)
    np.testing.assert_array_equal(N.values, signed_recurrence(cells.values))
    for axis in range(N.values.ndim):
        assert np.all(np.diff(N.values, axis=axis) >= 0)
    sizes = tuple(min(s, e) for s, e in zip(sizes, grid.extents))
    Q = all_box_counts(N, sizes).values
    for idx in itertools.product(*(range(e) for e in Q.shape)):
        assert Q[idx] == naive_window(arr, grid.cell_lengths, idx, sizes)
        assert Q[idx] == box_count(N, idx, sizes)
