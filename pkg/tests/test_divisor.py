from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from troplane.curve import cycle_of
from troplane.divisor import (
    PLFunction,
    abel_jacobi,
    cell_of,
    divisor_of_pl,
    equivalent_bruteforce,
    is_internal,
    linearly_equivalent,
    pl_vertex_values,
)
from troplane.errors import TroplaneError
from troplane.fixtures import rectangle_over_diamond, square_cycle_curve, tropical_line, unit_square_curve
from troplane.intersect import Divisor, self_intersection

F = Fraction
RECT = rectangle_over_diamond(F(-3, 2), F(3, 2), 1, -1)


def divisor(points, host):
    return Divisor.of([(F(str(x)), F(str(y))) for x, y in points], host)


SPREAD_INTERNAL = [(-1.2, 1), (1.2, 1), (-0.7, -1), (0.7, -1)]
RAYS_INTERNAL = [(-1.7, -1.2), (0.5, 1), (1.7, 1.2), (2.1, 1.6)]
ONE_SIDED = [(1.5, 1), (1.8, -1.3), (-1.7, -1.2), (-2, 1.5)]
EXPOSED_FACE = [(-2, 1.5), (1.7, 1.2), (-1.5, -1), (1.5, -1)]


def test_tent_function_divisor():
    curve = unit_square_curve()
    # slope 1 up to the midpoint of the bounded edge, then back down
    phi = PLFunction({("e", 0): ((F(1),), (F(1), F(-1)))})
    D = divisor_of_pl(curve, phi)
    assert D == Divisor.of({(0, 0): 2, (-1, -1): -1, (1, 1): -1})
    assert D.degree == 0


def test_discontinuous_function_rejected():
    curve = square_cycle_curve()
    cyc = cycle_of(curve)
    phi = PLFunction({("e", cyc.edges[0]): ((), (F(1),))})
    with pytest.raises(TroplaneError) as err:
        pl_vertex_values(curve, phi)
    assert err.value.code == "INVALID_PL"
    with pytest.raises(TroplaneError):
        divisor_of_pl(unit_square_curve(), PLFunction({("r", 0): ((), (F(1),))}))


def test_principal_divisors_are_equivalent_to_zero():
    curve = square_cycle_curve()
    phi = PLFunction({("r", 0): ((F(1, 2), F(1)), (F(2), F(-1), F(0))), ("r", 2): ((F(3, 2),), (F(-1), F(0)))})
    D = divisor_of_pl(curve, phi)
    zero = Divisor((), curve)
    assert linearly_equivalent(curve, D, zero)
    assert equivalent_bruteforce(curve, D, zero, 2)


def test_abel_jacobi_of_self_intersection():
    curve = square_cycle_curve()
    aj = abel_jacobi(curve, self_intersection(curve))
    assert (aj.degree, aj.position, aj.length) == (4, 4, 8)


def test_genus_zero_equivalence_is_degree():
    curve = unit_square_curve()
    assert linearly_equivalent(curve, Divisor.of([(0, 0)], curve), Divisor.of([(-3, -1)], curve))
    assert not linearly_equivalent(curve, Divisor.of([(0, 0)], curve), Divisor((), curve))


@pytest.mark.parametrize(
    "points, internal, dim, exposed",
    [(SPREAD_INTERNAL, True, 3, False), (RAYS_INTERNAL, True, 3, False), (ONE_SIDED, False, 3, False), (EXPOSED_FACE, True, 2, True)],
)
def test_classified_divisors(points, internal, dim, exposed):
    D = divisor(points, RECT)
    assert is_internal(RECT, D) is internal
    cell = cell_of(RECT, D)
    assert (cell.dimension, cell.exposed) == (dim, exposed)


def test_all_ray_cell_is_full_dimensional():
    curve = square_cycle_curve()
    D = Divisor.of([(-2, -2), (2, 2), (-2, 2), (2, -2)], curve)
    cell = cell_of(curve, D)
    assert cell.dimension == 4 and not cell.internal and cell.maximal


def test_cell_of_outside_linear_system():
    curve = square_cycle_curve()
    with pytest.raises(TroplaneError) as err:
        cell_of(curve, Divisor.of([(0, 1), (-1, -1), (1, -1), (1, 1)], curve))
    assert err.value.code == "NOT_IN_LINEAR_SYSTEM"
    with pytest.raises(TroplaneError):
        cell_of(unit_square_curve(), Divisor.of([(0, 0), (1, 1)], unit_square_curve()))


def test_internal_counts_multiplicity_and_edge_interior():
    curve = square_cycle_curve()
    assert is_internal(curve, Divisor.of({(-1, -1): 2, (3, 3): 2}, curve))
    assert is_internal(curve, Divisor.of([(0, 1), (3, 3), (-3, -3), (5, 5)], curve))
    assert not is_internal(curve, Divisor.of([(-1, -1), (3, 3), (-3, -3), (5, 5)], curve))
    assert is_internal(tropical_line(), Divisor.of([(0, 0)], tropical_line()))


def test_unsupported_genus():
    import random

    from strategies import random_smooth_polynomial
    from troplane.curve import genus
    from troplane.lattice import LatticePolygon

    _, curve = random_smooth_polynomial(random.Random(3), LatticePolygon.hull_of([(0, 0), (3, 0), (3, 2), (0, 2)]))
    assert genus(curve) == 2
    with pytest.raises(TroplaneError) as err:
        linearly_equivalent(curve, Divisor(()), Divisor(()))
    assert err.value.code == "UNSUPPORTED_GENUS"


def _half_grid(curve, reach=3):
    """Points of ``curve`` at lattice parameters in (1/2)Z, rays cut at ``reach``."""
    pts = set(curve.vertices)
    for piece in curve.pieces():
        top = piece.length if piece.length is not None else F(reach)
        t = F(1, 2)
        while t < top:
            pts.add((piece.start[0] + t * piece.direction[0], piece.start[1] + t * piece.direction[1]))
            t += F(1, 2)
    return sorted(pts)


@settings(max_examples=200)
@given(st.data())
def test_equivalence_agrees_with_chip_firing(data):
    curve = square_cycle_curve()
    grid = _half_grid(curve)
    k = data.draw(st.integers(1, 3))
    D = Divisor.of(data.draw(st.lists(st.sampled_from(grid), min_size=k, max_size=k)), curve)
    E = Divisor.of(data.draw(st.lists(st.sampled_from(grid), min_size=k, max_size=k)), curve)
    assert linearly_equivalent(curve, D, E) == equivalent_bruteforce(curve, D, E, 2)


@given(st.sampled_from([(1, 0), (0, 1), (1, 1)]), st.integers(1, 7))
def test_moving_chips_oppositely_around_the_cycle_preserves_class(_, steps):
    curve = square_cycle_curve()
    cyc = cycle_of(curve)
    start = curve.vertices[cyc.vertices[0]]

    def walk(dist):
        dist = F(dist) % cyc.length
        for v, k in zip(cyc.vertices, cyc.edges):
            e = curve.bounded_edges[k]
            if dist <= e.length:
                frm = curve.vertices[v]
                d = e.direction if e.u == v else (-e.direction[0], -e.direction[1])
                return (frm[0] + dist * d[0], frm[1] + dist * d[1])
            dist -= e.length
        raise AssertionError

    h = F(steps, 2)
    D = Divisor.of([start, start], curve)
    E = Divisor.of([walk(h), walk(-h)], curve)
    assert linearly_equivalent(curve, D, E)
    assert equivalent_bruteforce(curve, D, E, 2)
