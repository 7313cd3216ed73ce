"""Random polygons and polynomials shared by the property tests."""

import random
from fractions import Fraction

from hypothesis import strategies as st

from troplane.curve import TropicalPolynomial, curve_of, is_smooth
from troplane.lattice import LatticePolygon

small_points = st.tuples(st.integers(-2, 2), st.integers(-2, 2))


@st.composite
def polygons(draw, max_points=8):
    """Two-dimensional lattice polygons with at most ``max_points`` lattice points."""
    pts = draw(st.lists(small_points, min_size=3, max_size=5, unique=True))
    P = LatticePolygon.hull_of(pts)
    if P.dim != 2 or len(P.lattice_points()) > max_points:
        from hypothesis import assume

        assume(False)
    return P


def random_smooth_polynomial(rng: random.Random, polygon: LatticePolygon, tries: int = 200):
    """Random valuations on all lattice points until the curve is smooth."""
    pts = polygon.lattice_points()
    for attempt in range(tries):
        # a strictly convex quadratic keeps every lattice point on the hull; noise varies the shape
        k = rng.randint(0, 6) if attempt % 2 else 0
        terms = tuple(
            (p, k * (p[0] ** 2 + p[1] ** 2) + Fraction(rng.randint(0, 40), rng.choice([1, 2, 4]))) for p in pts
        )
        poly = TropicalPolynomial(terms)
        curve = curve_of(poly)
        if is_smooth(curve):
            return poly, curve
    return None


def random_polygon(rng: random.Random, max_points: int = 8, box: int = 2) -> LatticePolygon:
    while True:
        pts = [(rng.randint(0, box), rng.randint(0, box)) for _ in range(rng.randint(3, 5))]
        P = LatticePolygon.hull_of(pts)
        if P.dim == 2 and len(P.lattice_points()) <= max_points:
            return P
