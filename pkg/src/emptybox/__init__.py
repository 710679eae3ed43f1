"""Approximate and exact maximum empty boxes and hypercubes among points in a box."""

from .approx_box import (
    ApproxParams,
    SearchResult,
    approx_max_empty_box,
    derive_params,
    enumerate_large_exponents,
    search_canonical_box,
)
from .approx_cube import approx_max_empty_cube, derive_cube_params
from .core import (
    AffineTransform,
    DegenerateRegionError,
    EmptyBoxError,
    InputDomainError,
    OpenBox,
    PointSet,
    ScaleGuardError,
    contains_point_strict,
    normalize_to_unit,
    volume,
)
from .oracle import (
    enumerate_restricted_boxes,
    exact_max_empty_box,
    exact_max_empty_cube,
    exact_max_empty_rect_2d,
    is_maximal_empty,
)

__version__ = "0.1.0"

__all__ = [
    "AffineTransform",
    "approx_max_empty_box",
    "approx_max_empty_cube",
    "ApproxParams",
    "contains_point_strict",
    "DegenerateRegionError",
    "derive_cube_params",
    "derive_params",
    "EmptyBoxError",
    "enumerate_large_exponents",
    "enumerate_restricted_boxes",
    "exact_max_empty_box",
    "exact_max_empty_cube",
    "exact_max_empty_rect_2d",
    "InputDomainError",
    "is_maximal_empty",
    "normalize_to_unit",
    "OpenBox",
    "PointSet",
    "ScaleGuardError",
    "search_canonical_box",
    "SearchResult",
    "volume",
]
