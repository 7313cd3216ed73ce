"""Exact rational and lattice geometry in the plane.

Everything here works on ``fractions.Fraction`` and ``int``; no floating point
enters any predicate.  Lattice vectors are ``(int, int)`` tuples and rational
points are ``(Fraction, Fraction)`` tuples.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Tuple, Union

from .errors import TroplaneError

Vec = Tuple[int, int]
Point = Tuple[Fraction, Fraction]
Number = Union[int, Fraction, str]


# ---------------------------------------------------------------------------
# rationals

def q(value: Number) -> Fraction:
    """Coerce ``value`` to an exact rational.

    Strings may be ``"p/q"``, integers, or finite decimals (``"0.7"`` is 7/10).
    Floats are refused: they would smuggle rounding into exact code paths.
    """
    if isinstance(value, bool):
        raise TroplaneError("NOT_RATIONAL", f"boolean {value!r} is not a rational")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise TroplaneError("PARSE_ERROR", f"not a rational: {value!r}") from exc
    raise TroplaneError("NOT_RATIONAL", f"{value!r} ({type(value).__name__}) is not exact")


def fmt_q(value: Fraction) -> str:
    """Serialize a rational as ``"p/q"`` (reduced, q > 0) or ``"p"``."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def point(x: Number, y: Number) -> Point:
    return (q(x), q(y))


def fmt_point(p: Point) -> list[str]:
    return [fmt_q(p[0]), fmt_q(p[1])]


# ---------------------------------------------------------------------------
# vectors

def primitive(v: Sequence[int]) -> tuple[Vec, int]:
    """Split a nonzero lattice vector as ``k * p`` with ``p`` primitive, ``k >= 1``."""
    x, y = int(v[0]), int(v[1])
    if x == 0 and y == 0:
        raise TroplaneError("ZERO_VECTOR", "the zero vector has no primitive direction")
    k = math.gcd(x, y)
    return (x // k, y // k), k


def det2(u: Sequence, v: Sequence):
    return u[0] * v[1] - u[1] * v[0]


def dot(u: Sequence, v: Sequence):
    return u[0] * v[0] + u[1] * v[1]


def sub(p: Sequence, r: Sequence) -> tuple:
    return (p[0] - r[0], p[1] - r[1])


def add(p: Sequence, r: Sequence) -> tuple:
    return (p[0] + r[0], p[1] + r[1])


def scale(c, v: Sequence) -> tuple:
    return (c * v[0], c * v[1])


def rational_direction(v: Sequence[Fraction]) -> tuple[Vec, Fraction]:
    """Write a nonzero rational vector as ``lam * p`` with ``p`` primitive integral."""
    x, y = Fraction(v[0]), Fraction(v[1])
    if x == 0 and y == 0:
        raise TroplaneError("ZERO_VECTOR", "zero displacement has no direction")
    den = x.denominator * y.denominator // math.gcd(x.denominator, y.denominator)
    iv = (int(x * den), int(y * den))
    p, k = primitive(iv)
    return p, Fraction(k, den)


def lattice_length(p: Sequence, r: Sequence) -> Fraction:
    """Lattice length of the segment from ``p`` to ``r``.

    ``r - p`` must be a rational multiple of a lattice vector, which holds for
    any pair of rational points; irrational input is rejected up front.
    """
    try:
        d = (q(r[0]) - q(p[0]), q(r[1]) - q(p[1]))
    except TroplaneError as exc:
        raise TroplaneError("IRRATIONAL_DIRECTION", "endpoints must be exact rationals") from exc
    if d == (0, 0):
        return Fraction(0)
    return rational_direction(d)[1]


def cyclic_sort(dirs: Iterable[Vec]) -> list[Vec]:
    """Sort directions counterclockwise by angle starting from the positive x-axis."""

    def key(v):
        x, y = v
        half = 0 if (y > 0 or (y == 0 and x > 0)) else 1
        return half, _AngleKey(v)

    return sorted(set(dirs), key=key)


class _AngleKey:
    # exact comparison of angles within one half plane
    __slots__ = ("v",)

    def __init__(self, v):
        self.v = v

    def __lt__(self, other):
        return det2(self.v, other.v) > 0

    def __eq__(self, other):
        return det2(self.v, other.v) == 0


# ---------------------------------------------------------------------------
# polygons

def convex_hull(points: Iterable[Sequence]) -> list[tuple]:
    """Counterclockwise strict convex hull (collinear points dropped).

    Degenerate inputs return one point or the two extreme points of a segment.
    """
    pts = sorted(set(tuple(p) for p in points))
    if len(pts) <= 2:
        return pts

    def half(seq):
        out: list = []
        for p in seq:
            while len(out) >= 2 and det2(sub(out[-1], out[-2]), sub(p, out[-2])) <= 0:
                out.pop()
            out.append(p)
        return out

    lower = half(pts)
    upper = half(reversed(pts))
    hull = lower[:-1] + upper[:-1]
    if len(hull) == 2 and hull[0] == hull[1]:
        return hull[:1]
    return hull


def shoelace(vertices: Sequence[Sequence]) -> Fraction:
    """Signed Euclidean area of a closed polygon (positive for ccw)."""
    n = len(vertices)
    if n < 3:
        return Fraction(0)
    s = sum(det2(vertices[i], vertices[(i + 1) % n]) for i in range(n))
    return Fraction(s) / 2


@dataclass(frozen=True)
class LatticePolygon:
    """Convex lattice polygon with counterclockwise vertices.

    Segments and single points are allowed as degenerate polygons so that
    Newton polygons of one-dimensional supports fit the same type.
    """

    vertices: tuple[Vec, ...]

    def __post_init__(self):
        verts = tuple((int(a), int(b)) for a, b in self.vertices)
        if not verts:
            raise TroplaneError("EMPTY_POLYGON", "a polygon needs at least one vertex")
        if tuple(convex_hull(verts)) != _rotate_to_min(verts) and len(verts) > 2:
            raise TroplaneError("NOT_CONVEX", f"{verts} is not a strictly convex ccw polygon")
        object.__setattr__(self, "vertices", _rotate_to_min(verts) if len(verts) > 2 else tuple(sorted(verts)))

    @classmethod
    def hull_of(cls, points: Iterable[Sequence[int]]) -> "LatticePolygon":
        return cls(tuple(convex_hull(points)))

    @property
    def area(self) -> Fraction:
        return shoelace(self.vertices)

    @property
    def dim(self) -> int:
        return min(len(self.vertices) - 1, 2)

    def edges(self) -> list[tuple[Vec, Vec]]:
        """Boundary edges oriented counterclockwise."""
        n = len(self.vertices)
        if n < 3:
            return []
        return [(self.vertices[i], self.vertices[(i + 1) % n]) for i in range(n)]

    def contains(self, p: Sequence) -> bool:
        return polygon_contains(self.vertices, p)

    def lattice_points(self) -> list[Vec]:
        xs = [v[0] for v in self.vertices]
        ys = [v[1] for v in self.vertices]
        return [
            (x, y)
            for x in range(min(xs), max(xs) + 1)
            for y in range(min(ys), max(ys) + 1)
            if self.contains((x, y))
        ]

    def interior_lattice_points(self) -> list[Vec]:
        return [p for p in self.lattice_points() if polygon_contains(self.vertices, p, strict=True)]


def _rotate_to_min(verts: tuple) -> tuple:
    i = verts.index(min(verts))
    return verts[i:] + verts[:i]


def polygon_contains(vertices: Sequence[Sequence], p: Sequence, strict: bool = False) -> bool:
    """Exact point-in-convex-polygon test; handles segment and point polygons."""
    n = len(vertices)
    if n == 1:
        return not strict and tuple(vertices[0]) == tuple(p)
    if n == 2:
        a, b = vertices
        if det2(sub(b, a), sub(p, a)) != 0:
            return False
        t = dot(sub(p, a), sub(b, a))
        return (0 < t < dot(sub(b, a), sub(b, a))) if strict else (0 <= t <= dot(sub(b, a), sub(b, a)))
    for i in range(n):
        c = det2(sub(vertices[(i + 1) % n], vertices[i]), sub(p, vertices[i]))
        if c < 0 or (strict and c == 0):
            return False
    return True


def is_unimodular(triangle: LatticePolygon | Sequence[Vec]) -> bool:
    verts = triangle.vertices if isinstance(triangle, LatticePolygon) else tuple(triangle)
    if len(verts) != 3:
        raise TroplaneError("NOT_A_TRIANGLE", f"{len(verts)} vertices")
    return abs(shoelace(verts)) == Fraction(1, 2)


def minkowski_sum(P: LatticePolygon, Q: LatticePolygon) -> LatticePolygon:
    return LatticePolygon.hull_of(add(a, b) for a in P.vertices for b in Q.vertices)


def mixed_volume(P: LatticePolygon, Q: LatticePolygon) -> Fraction:
    """``area(P + Q) - area(P) - area(Q)`` with Euclidean areas."""
    return minkowski_sum(P, Q).area - P.area - Q.area


# ---------------------------------------------------------------------------
# regular subdivisions

@dataclass(frozen=True)
class LiftedConfiguration:
    points: tuple[tuple[Vec, Fraction], ...]

    def __post_init__(self):
        pts = tuple(((int(e[0]), int(e[1])), q(h)) for e, h in self.points)
        exps = [e for e, _ in pts]
        if len(set(exps)) != len(exps):
            raise TroplaneError("DUPLICATE_EXPONENT", "lifted configuration repeats an exponent")
        object.__setattr__(self, "points", tuple(sorted(pts)))

    @classmethod
    def of(cls, mapping: dict) -> "LiftedConfiguration":
        return cls(tuple(mapping.items()))

    def lift(self) -> dict[Vec, Fraction]:
        return dict(self.points)


@dataclass(frozen=True)
class Cell:
    """A cell of a subdivision: hull vertices (ccw) and every marked point on it."""

    vertices: tuple[Vec, ...]
    points: tuple[Vec, ...]

    @property
    def polygon(self) -> LatticePolygon:
        return LatticePolygon(self.vertices)

    def edges(self) -> list[tuple[Vec, Vec]]:
        n = len(self.vertices)
        if n < 3:
            return []
        return [(self.vertices[i], self.vertices[(i + 1) % n]) for i in range(n)]


def edge_key(a: Vec, b: Vec) -> tuple[Vec, Vec]:
    return (a, b) if a <= b else (b, a)


@dataclass(frozen=True)
class Subdivision:
    """A polyhedral subdivision of the convex hull of a finite point set.

    ``cells`` are in canonical order, which fixes vertex numbering of the dual
    tropical curve.
    """

    points: tuple[Vec, ...]
    cells: tuple[Cell, ...]
    dim: int

    @classmethod
    def from_cells(cls, points: Iterable[Vec], cell_point_sets: Iterable[Iterable[Vec]], dim: int = 2):
        pts = tuple(sorted(set(points)))
        cells = []
        for s in cell_point_sets:
            s = tuple(sorted(set(s)))
            hull = convex_hull(s)
            hull = tuple(_rotate_to_min(tuple(hull))) if len(hull) > 2 else tuple(sorted(hull))
            cells.append(Cell(hull, s))
        cells.sort(key=lambda c: (c.vertices, c.points))
        return cls(pts, tuple(cells), dim)

    @property
    def hull(self) -> LatticePolygon:
        return LatticePolygon.hull_of(self.points)

    def edge_cells(self) -> dict[tuple[Vec, Vec], list[tuple[int, tuple[Vec, Vec]]]]:
        """Map each cell edge (as an unordered key) to the cells using it.

        Values list ``(cell index, edge oriented ccw for that cell)``.
        """
        out: dict = {}
        for i, cell in enumerate(self.cells):
            for a, b in cell.edges():
                out.setdefault(edge_key(a, b), []).append((i, (a, b)))
        return out

    def interior_edges(self) -> list[tuple[tuple[Vec, Vec], int, int]]:
        return sorted(
            (key, uses[0][0], uses[1][0]) for key, uses in self.edge_cells().items() if len(uses) == 2
        )

    def boundary_edges(self) -> list[tuple[int, tuple[Vec, Vec]]]:
        return sorted(
            (uses[0][0], uses[0][1]) for uses in self.edge_cells().values() if len(uses) == 1
        )

    def is_unimodular_triangulation(self) -> bool:
        return self.dim == 2 and all(
            len(c.vertices) == 3 and is_unimodular(c.vertices) for c in self.cells
        )

    def used_points(self) -> set[Vec]:
        return {v for c in self.cells for v in c.vertices}


def _plane_through(p1, p2, p3):
    """Coefficients (a, b, c) of the non-vertical plane z = a x + b y + c."""
    (x1, y1, z1), (x2, y2, z2), (x3, y3, z3) = p1, p2, p3
    den = det2((x2 - x1, y2 - y1), (x3 - x1, y3 - y1))
    a = Fraction(det2((z2 - z1, y2 - y1), (z3 - z1, y3 - y1)), 1) / den
    b = Fraction(det2((x2 - x1, z2 - z1), (x3 - x1, z3 - z1)), 1) / den
    c = z1 - a * x1 - b * y1
    return a, b, c


def regular_subdivision(cfg: LiftedConfiguration) -> Subdivision:
    """Subdivision induced by the upper faces of the lifted point set.

    Upper hull (not lower) because tropical polynomials here are max-plus with
    lift ``-valuation``.  Coplanar lifted points stay marked on a common cell;
    no perturbation is applied.
    """
    lift = cfg.lift()
    pts = sorted(lift)
    if len(pts) == 1:
        return Subdivision(tuple(pts), (Cell(tuple(pts), tuple(pts)),), 0)
    hull = convex_hull(pts)
    if len(hull) == 2:
        return _regular_subdivision_1d(pts, lift)
    faces = set()
    for i, j, k in itertools.combinations(range(len(pts)), 3):
        a, b, c = pts[i], pts[j], pts[k]
        if det2(sub(b, a), sub(c, a)) == 0:
            continue
        pa, pb, pc = _plane_through((*a, lift[a]), (*b, lift[b]), (*c, lift[c]))
        on = []
        ok = True
        for m in pts:
            val = pa * m[0] + pb * m[1] + pc
            if lift[m] > val:
                ok = False
                break
            if lift[m] == val:
                on.append(m)
        if ok:
            faces.add(tuple(on))
    return Subdivision.from_cells(pts, faces, 2)


def _regular_subdivision_1d(pts, lift) -> Subdivision:
    a, b = convex_hull(pts)
    d = sub(b, a)
    ordered = sorted(pts, key=lambda p: dot(sub(p, a), d))
    coords = [(Fraction(dot(sub(p, a), d)), lift[p], p) for p in ordered]
    upper: list = []
    for c in coords:
        while len(upper) >= 2:
            (t1, h1, _), (t2, h2, _) = upper[-2], upper[-1]
            # pop the middle point unless it is strictly above the chord
            if (h2 - h1) * (c[0] - t1) <= (c[1] - h1) * (t2 - t1):
                upper.pop()
            else:
                break
        upper.append(c)
    cells = []
    for (t1, h1, p1), (t2, h2, p2) in zip(upper, upper[1:]):
        on = [
            p
            for t, h, p in coords
            if t1 <= t <= t2 and (h - h1) * (t2 - t1) == (h2 - h1) * (t - t1)
        ]
        cells.append(on)
    return Subdivision.from_cells(pts, cells, 1)


def lift_from_vertex_positions(sub_: Subdivision, positions: Sequence[Point]) -> dict[Vec, Fraction]:
    """Recover lifts (up to an additive constant) from dual vertex positions.

    Within a cell with dual vertex ``w``, ``<e, w> + lift(e)`` is constant, so
    lifts propagate across cells sharing points.  Used to turn an assembled
    curve back into a tropical polynomial.
    """
    lift: dict[Vec, Fraction] = {}
    start = sub_.cells[0].points[0]
    lift[start] = Fraction(0)
    changed = True
    while changed:
        changed = False
        for cell, w in zip(sub_.cells, positions):
            known = [e for e in cell.points if e in lift]
            if not known:
                continue
            ref = known[0]
            const = dot(ref, w) + lift[ref]
            for e in cell.points:
                val = const - dot(e, w)
                if e not in lift:
                    lift[e] = val
                    changed = True
                elif lift[e] != val:
                    raise TroplaneError("INCONSISTENT_LIFT", f"cell {cell.vertices} is not closed")
    return lift
