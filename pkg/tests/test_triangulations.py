import itertools
from fractions import Fraction

import pytest

from troplane.errors import TroplaneError
from troplane.lattice import LatticePolygon, LiftedConfiguration, polygon_contains, regular_subdivision
from troplane.triangulations import regular_unimodular_triangulations, regularity_lift

F = Fraction


def _inside_open(tri, p):
    a, b, c = tri
    if (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]) < 0:
        b, c = c, b
    return polygon_contains((a, b, c), p, strict=True)


def exact_cover_count(polygon: LatticePolygon) -> int:
    """Count triangulations into unimodular triangles by exact cover of generic sample points."""
    pts = polygon.lattice_points()
    tris = [
        t
        for t in itertools.combinations(pts, 3)
        if abs((t[1][0] - t[0][0]) * (t[2][1] - t[0][1]) - (t[1][1] - t[0][1]) * (t[2][0] - t[0][0])) == 1
    ]
    samples = []
    for t in tris:
        cx = F(t[0][0] + t[1][0] + t[2][0], 3) + F(1, 1000)
        cy = F(t[0][1] + t[1][1] + t[2][1], 3) + F(1, 1001)
        samples.append((cx, cy))
    samples = [s for s in samples if polygon_contains(polygon.vertices, s)]
    covers = {s: [t for t in tris if _inside_open(t, s)] for s in samples}
    target = int(2 * polygon.area)

    def overlaps(t1, t2):
        # interiors are disjoint iff some edge line separates the two triangles
        for a, b in ((t1, t2), (t2, t1)):
            for i in range(3):
                p, r, other = a[i], a[(i + 1) % 3], a[(i + 2) % 3]
                side = lambda z: (r[0] - p[0]) * (z[1] - p[1]) - (r[1] - p[1]) * (z[0] - p[0])
                s0 = side(other)
                if all(side(z) * s0 <= 0 for z in b):
                    return False
        return True

    def count(chosen):
        if len(chosen) == target:
            return 1
        s = next(s for s in samples if not any(_inside_open(t, s) for t in chosen))
        return sum(count(chosen + [t]) for t in covers[s] if not any(overlaps(t, c) for c in chosen))

    return count([])


POLYGONS = {
    "unit square": [(0, 0), (1, 0), (1, 1), (0, 1)],
    "diamond": [(1, 0), (2, 1), (1, 2), (0, 1)],
    "doubled triangle": [(0, 0), (2, 0), (0, 2)],
    "two squares": [(0, 0), (2, 0), (2, 1), (0, 1)],
    "hexagon": [(1, 0), (2, 0), (2, 1), (1, 2), (0, 2), (0, 1)],
    "three by three grid": [(0, 0), (2, 0), (2, 2), (0, 2)],
}


@pytest.mark.parametrize("name", sorted(POLYGONS))
def test_counts_match_exact_cover(name):
    P = LatticePolygon.hull_of(POLYGONS[name])
    found = regular_unimodular_triangulations(P)
    assert len(found) == exact_cover_count(P)
    for sub_ in found:
        assert sub_.is_unimodular_triangulation()


def test_known_counts():
    assert len(regular_unimodular_triangulations(LatticePolygon.hull_of(POLYGONS["unit square"]))) == 2
    assert len(regular_unimodular_triangulations(LatticePolygon.hull_of(POLYGONS["diamond"]))) == 1


def test_three_by_three_grid():
    # every triangulation of the 3x3 grid is regular, and there are 64
    grid = LatticePolygon.hull_of(POLYGONS["three by three grid"])
    assert len(regular_unimodular_triangulations(grid)) == 64


def test_each_triangulation_is_induced_by_its_lift():
    P = LatticePolygon.hull_of(POLYGONS["hexagon"])
    for sub_ in regular_unimodular_triangulations(P):
        tris = frozenset(tuple(sorted(c.vertices)) for c in sub_.cells)
        lift = regularity_lift(sorted(P.lattice_points()), tris)
        again = regular_subdivision(LiftedConfiguration.of(lift))
        assert frozenset(tuple(sorted(c.vertices)) for c in again.cells) == tris


def test_limits():
    big = LatticePolygon.hull_of([(0, 0), (4, 0), (4, 2), (0, 2)])
    with pytest.raises(TroplaneError) as err:
        regular_unimodular_triangulations(big)
    assert err.value.code == "POLYGON_TOO_LARGE"
    with pytest.raises(TroplaneError) as err:
        regular_unimodular_triangulations(LatticePolygon.hull_of([(0, 0), (3, 0)]))
    assert err.value.code == "DEGENERATE_DUAL"
