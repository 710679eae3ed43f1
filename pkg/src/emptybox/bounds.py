"""Closed-form bounds on empty-box volumes and on the search's work counts."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

from .approx_box import count_large_exponents, derive_params
from .pointgen import first_primes


@dataclass
class BoundReport:
    quantity: str
    n: int
    d: int
    lower: float
    upper: float
    epsilon: float | None = None
    formulas: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)
    degenerate: bool = False

    def __post_init__(self):
        if not self.degenerate and self.lower > self.upper:
            raise ValueError(f"{self.quantity}: lower {self.lower} exceeds upper {self.upper}")

    def to_dict(self) -> dict:
        return asdict(self)


def integer_root(n: int, d: int) -> int:
    """Largest integer ``r`` with ``r**d <= n``."""
    if n < 0 or d < 1:
        raise ValueError("need n >= 0 and d >= 1")
    if n < 2 or d == 1:
        return n
    # integer Newton iteration from above; decreases until it reaches the floor
    r = 1 << -(-n.bit_length() // d)
    while True:
        s = ((d - 1) * r + n // r ** (d - 1)) // d
        if s >= r:
            return r
        r = s


def bounds_Ad(n: int, d: int) -> BoundReport:
    """Bounds on the minimum, over ``n``-point sets, of the largest empty box volume."""
    if d < 2:
        raise ValueError("d must be >= 2")
    if n == 0:
        return BoundReport("A_d", 0, d, 1.0, 1.0, formulas={"lower": "whole cube", "upper": "whole cube"})
    lower = max(1.0 / (n + 1), 1.25 / (n + 5))
    if d == 2:
        upper = 4.0 / n
        up_formula = "4/n (van der Corput)"
    else:
        upper = 2 ** (d - 1) * math.prod(first_primes(d - 1)) / n
        up_formula = "2^(d-1) * prod(first d-1 primes) / n (Halton-Hammersley)"
    return BoundReport(
        "A_d", n, d, lower, upper,
        formulas={"lower": "max(1/(n+1), (5/4)/(n+5))", "upper": up_formula},
    )


def bounds_Aprime(n: int, d: int) -> BoundReport:
    """Bounds on the analogous quantity for empty hypercubes."""
    if n < 1 or d < 2:
        raise ValueError("need n >= 1 and d >= 2")
    r = integer_root(n, d)
    if r ** d == n:
        lower = 1.0 / (r + 1) ** d
    else:
        lower = 1.0 / (n ** (1.0 / d) + 1.0) ** d
    upper = 1.0 / (r + 1) ** d
    return BoundReport(
        "A_prime_d", n, d, lower, upper,
        formulas={"lower": "(n^(1/d) + 1)^(-d)", "upper": "(floor(n^(1/d)) + 1)^(-d)"},
        extra={"integer_root": r},
    )


def restricted_count_bounds(n: int, d: int) -> BoundReport:
    """Lower bound achieved by a construction and the universal upper bound on maximal boxes."""
    if d < 1 or n < 0:
        raise ValueError("need d >= 1 and n >= 0")
    lower = (n // d + 1) ** d
    upper = math.comb(n, d) * math.comb(2 * d, d)
    return BoundReport(
        "restricted_count", n, d, lower, upper,
        formulas={"lower": "(floor(n/d) + 1)^d", "upper": "C(n,d) * C(2d,d)"},
        degenerate=n < d,
    )


def algorithm_count_bounds(n: int, d: int, epsilon: float) -> BoundReport:
    """Work bounds for the box search: canonical boxes tested and grid cells per box.

    ``lower``/``upper`` bracket the canonical-box count: the exact number of
    large exponent tuples and ``C(k+d, d)``. The closed forms
    ``(2e/eps)^d log^d n`` and ``12 (2d/eps)^d n`` are only valid for
    ``n >= 12`` and ``d >= 3`` and are omitted otherwise.
    """
    params = derive_params(n, d, epsilon, jitter=False)
    k = params.k
    binom = math.comb(k + d, d)
    exact = count_large_exponents(k, d)
    extra = {
        "k": k,
        "m": params.m,
        "large_tuples": exact,
        "canonical_binomial": binom,
    }
    formulas = {"lower": "number of large exponent tuples", "upper": "C(k+d, d)"}
    in_regime = n >= 12 and d >= 3
    extra["closed_form_regime"] = in_regime
    if in_regime:
        extra["canonical_closed_form"] = (2 * math.e / epsilon) ** d * math.log2(n) ** d
        extra["placement_closed_form"] = 12 * (2 * d / epsilon) ** d * n
        formulas["canonical_closed_form"] = "(2e/eps)^d * log2(n)^d"
        formulas["placement_closed_form"] = "12 * (2d/eps)^d * n"
    return BoundReport("canonical_count", n, d, float(exact), float(binom), epsilon, formulas, extra)


def grid_cells_bound(params, y) -> int:
    """``prod ceil(m a^(k+1) / a^(y_i))``, the cell-count bound for exponents ``y``."""
    k = params.k
    return math.prod(math.ceil(params.m * params.a ** (k + 1 - v)) for v in y)
