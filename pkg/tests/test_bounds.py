import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from emptybox.approx_box import derive_params
from emptybox.bounds import (
    algorithm_count_bounds,
    bounds_Ad,
    bounds_Aprime,
    grid_cells_bound,
    integer_root,
    restricted_count_bounds,
)


def test_ad_examples():
    rep = bounds_Ad(15, 2)
    assert rep.lower == 0.0625 and rep.upper == 4 / 15
    assert bounds_Ad(100, 2).upper == 0.04
    assert bounds_Ad(100, 3).upper == pytest.approx(0.24, abs=1e-15)
    assert bounds_Ad(10, 5).upper == 2 ** 4 * 2 * 3 * 5 * 7 / 10
    zero = bounds_Ad(0, 3)
    assert zero.lower == zero.upper == 1.0


def test_aprime_examples():
    rep = bounds_Aprime(9, 2)
    assert (rep.lower, rep.upper) == (1 / 16, 1 / 16)
    rep = bounds_Aprime(8, 3)
    assert (rep.lower, rep.upper) == (1 / 27, 1 / 27)
    rep = bounds_Aprime(10, 2)
    assert rep.lower == pytest.approx(1 / (math.sqrt(10) + 1) ** 2, rel=1e-15)
    assert rep.lower == pytest.approx(0.0577, abs=1e-4)
    assert rep.upper == 1 / 16


@given(st.integers(0, 10**40), st.integers(1, 12))
def test_integer_root(n, d):
    r = integer_root(n, d)
    assert r ** d <= n < (r + 1) ** d


@given(st.integers(1, 10**6), st.integers(2, 8))
def test_aprime_ordering(n, d):
    rep = bounds_Aprime(n, d)
    assert 0 < rep.lower <= rep.upper


def test_restricted_examples():
    assert (restricted_count_bounds(4, 2).lower, restricted_count_bounds(4, 2).upper) == (9, 36)
    assert (restricted_count_bounds(7, 2).lower, restricted_count_bounds(7, 2).upper) == (16, 126)
    for d in range(2, 9):
        rep = restricted_count_bounds(d, d)
        assert (rep.lower, rep.upper) == (2 ** d, math.comb(2 * d, d))
    rep = restricted_count_bounds(1, 2)
    assert rep.degenerate and rep.upper == 0


def test_restricted_bounds_are_exact_integers():
    rep = restricted_count_bounds(64, 16)
    assert isinstance(rep.upper, int) and rep.upper == math.comb(64, 16) * math.comb(32, 16)
    assert rep.lower == 5 ** 16


def test_algorithm_count_examples():
    rep = algorithm_count_bounds(100, 3, 0.5)
    k = derive_params(100, 3, 0.5, jitter=False).k
    assert rep.upper == math.comb(k + 3, 3)
    assert rep.extra["canonical_closed_form"] == pytest.approx((4 * math.e) ** 3 * math.log2(100) ** 3)
    assert rep.extra["canonical_closed_form"] == pytest.approx(3.78e5, rel=5e-3)
    assert rep.extra["placement_closed_form"] == 2_073_600
    small = algorithm_count_bounds(5, 3, 0.5)
    assert not small.extra["closed_form_regime"]
    assert "canonical_closed_form" not in small.extra


def test_grid_cells_bound_matches_extents():
    p = derive_params(50, 3, 0.4, jitter=False)
    y = (p.k - 1, p.k - 2, p.k - 5)
    expected = math.prod(math.ceil(p.m * p.a ** (p.k + 1 - v)) for v in y)
    assert grid_cells_bound(p, y) == expected


def test_lower_above_upper_is_rejected():
    from emptybox.bounds import BoundReport

    with pytest.raises(ValueError):
        BoundReport("A_d", 1, 2, 0.5, 0.25)
