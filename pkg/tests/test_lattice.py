from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from troplane.errors import TroplaneError
from troplane.lattice import (
    LatticePolygon,
    LiftedConfiguration,
    det2,
    fmt_q,
    is_unimodular,
    lattice_length,
    minkowski_sum,
    mixed_volume,
    primitive,
    q,
    regular_subdivision,
)

from strategies import polygons

UNIT_SQUARE = LatticePolygon.hull_of([(0, 0), (1, 0), (0, 1), (1, 1)])
DIAMOND = LatticePolygon.hull_of([(1, 0), (0, 1), (2, 1), (1, 2)])


def mixed_volume_by_support(P: LatticePolygon, Q: LatticePolygon) -> Fraction:
    """Sum over edges of Q of the support function of P at the scaled outer normal."""
    total = Fraction(0)
    verts = Q.vertices
    if len(verts) < 3:
        a, b = verts[0], verts[-1]
        n = (b[1] - a[1], a[0] - b[0])
        return Fraction(max(p[0] * n[0] + p[1] * n[1] for p in P.vertices) + max(-p[0] * n[0] - p[1] * n[1] for p in P.vertices))
    for i in range(len(verts)):
        a, b = verts[i], verts[(i + 1) % len(verts)]
        n = (b[1] - a[1], a[0] - b[0])
        total += max(p[0] * n[0] + p[1] * n[1] for p in P.vertices)
    return total


def test_rational_parsing_and_formatting():
    assert q("3/6") == Fraction(1, 2)
    assert fmt_q(Fraction(-4, 2)) == "-2"
    assert fmt_q(Fraction(3, 4)) == "3/4"


def test_primitive_and_lattice_length():
    assert primitive((4, -6)) == ((2, -3), 2)
    assert lattice_length((-1, -1), (1, 1)) == 2
    assert lattice_length((0, 0), (Fraction(1, 2), 0)) == Fraction(1, 2)


def test_polygon_basics():
    assert UNIT_SQUARE.area == 1
    assert DIAMOND.area == 2
    assert DIAMOND.interior_lattice_points() == [(1, 1)]
    assert len(DIAMOND.lattice_points()) == 5
    assert is_unimodular([(0, 0), (1, 0), (0, 1)])
    assert not is_unimodular([(0, 0), (2, 0), (0, 1)])


def test_non_convex_vertices_rejected():
    with pytest.raises(TroplaneError) as err:
        LatticePolygon(((0, 0), (1, 1), (2, 0), (1, 2)))
    assert err.value.code == "NOT_CONVEX"


def test_mixed_volume_known_values():
    assert mixed_volume(UNIT_SQUARE, UNIT_SQUARE) == 2
    assert mixed_volume(DIAMOND, DIAMOND) == 4
    line = LatticePolygon.hull_of([(0, 0), (1, 0), (0, 1)])
    assert mixed_volume(line, line) == 1
    assert minkowski_sum(UNIT_SQUARE, UNIT_SQUARE).area == 4


@given(polygons(), polygons())
def test_mixed_volume_matches_support_function_formula(P, Q):
    assert mixed_volume(P, Q) == mixed_volume_by_support(P, Q)
    assert mixed_volume(P, Q) == mixed_volume(Q, P)


@given(polygons(), st.integers(1, 3))
def test_mixed_volume_scales_linearly(P, k):
    kP = LatticePolygon(tuple((k * a, k * b) for a, b in P.vertices))
    assert mixed_volume(kP, P) == k * mixed_volume(P, P)
    assert mixed_volume(P, P) == 2 * P.area


def test_regular_subdivision_uses_upper_hull():
    cfg = LiftedConfiguration.of({(0, 0): -1, (1, 0): 0, (0, 1): 0, (1, 1): -1})
    sub_ = regular_subdivision(cfg)
    assert {frozenset(c.vertices) for c in sub_.cells} == {
        frozenset({(0, 0), (1, 0), (0, 1)}),
        frozenset({(1, 0), (1, 1), (0, 1)}),
    }
    diag = {frozenset(e) for e, _, _ in sub_.interior_edges()}
    assert diag == {frozenset({(1, 0), (0, 1)})}


def test_coplanar_lift_keeps_one_cell():
    cfg = LiftedConfiguration.of({(0, 0): 0, (1, 0): 0, (0, 1): 0, (1, 1): 0})
    sub_ = regular_subdivision(cfg)
    assert len(sub_.cells) == 1
    assert not sub_.is_unimodular_triangulation()


@given(polygons(max_points=9), st.randoms(use_true_random=False))
def test_subdivision_cells_tile_the_polygon(P, rng):
    lift = {p: Fraction(rng.randint(-20, 20)) for p in P.lattice_points()}
    sub_ = regular_subdivision(LiftedConfiguration.of(lift))
    total = sum(LatticePolygon.hull_of(c.vertices).area for c in sub_.cells)
    assert total == P.area
    for c in sub_.cells:
        a, b, cc = c.vertices[:3]
        assert det2((b[0] - a[0], b[1] - a[1]), (cc[0] - a[0], cc[1] - a[1])) != 0
