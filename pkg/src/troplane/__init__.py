"""Tropical plane curves, stable intersections and realizability of divisors."""

from .curve import TropicalCurve, TropicalPolynomial, curve_of, genus, is_smooth, parse_polynomial
from .divisor import abel_jacobi, cell_of, equivalent_bruteforce, is_internal, linearly_equivalent
from .errors import TroplaneError
from .intersect import Divisor, proper_intersection, self_intersection, stable_intersection
from .lattice import LatticePolygon, mixed_volume
from .realize import (
    certify_counterexample,
    family_of,
    local_dims,
    omega_region,
    pinned_vertices,
    psi,
    realizable_internal,
    rst_membership,
)
from .valuation import lemma31_witness, tropicalize_intersection

__all__ = [
    "Divisor",
    "LatticePolygon",
    "TropicalCurve",
    "TropicalPolynomial",
    "TroplaneError",
    "abel_jacobi",
    "cell_of",
    "certify_counterexample",
    "curve_of",
    "equivalent_bruteforce",
    "family_of",
    "genus",
    "is_internal",
    "is_smooth",
    "lemma31_witness",
    "linearly_equivalent",
    "local_dims",
    "mixed_volume",
    "omega_region",
    "parse_polynomial",
    "pinned_vertices",
    "proper_intersection",
    "psi",
    "realizable_internal",
    "rst_membership",
    "self_intersection",
    "stable_intersection",
    "tropicalize_intersection",
]
