"""Regular unimodular triangulations of a lattice polygon, by flip search."""

from __future__ import annotations

from collections import deque
from fractions import Fraction
from typing import Optional

from . import lattice as L
from .errors import TroplaneError
from .lattice import LatticePolygon, LiftedConfiguration, Subdivision, Vec, det2, sub
from .lp import LinearSystem, strictly_feasible

MAX_LATTICE_POINTS = 12

Triangle = tuple[Vec, Vec, Vec]


def _tri(a: Vec, b: Vec, c: Vec) -> Triangle:
    return tuple(sorted((a, b, c)))  # type: ignore[return-value]


def _as_triangles(sub_: Subdivision) -> frozenset:
    return frozenset(_tri(*c.vertices) for c in sub_.cells)


def _interior_edges(tris: frozenset) -> dict[tuple[Vec, Vec], list[Triangle]]:
    edges: dict = {}
    for t in tris:
        for i in range(3):
            a, b = t[i], t[(i + 1) % 3]
            edges.setdefault(L.edge_key(a, b), []).append(t)
    return {k: v for k, v in edges.items() if len(v) == 2}


def _opposite(t: Triangle, edge) -> Vec:
    return next(p for p in t if p not in edge)


def _flip(tris: frozenset, edge, pair) -> Optional[frozenset]:
    a, b = edge
    c, d = _opposite(pair[0], edge), _opposite(pair[1], edge)
    # convex quadrilateral a c b d: a and b on strictly opposite sides of cd
    s1 = det2(sub(d, c), sub(a, c))
    s2 = det2(sub(d, c), sub(b, c))
    if s1 == 0 or s2 == 0 or (s1 > 0) == (s2 > 0):
        return None
    return (tris - set(pair)) | {_tri(c, d, a), _tri(c, d, b)}


def _affine_coords(p: Vec, t: Triangle) -> tuple[Fraction, Fraction, Fraction]:
    a, b, c = t
    den = det2(sub(b, a), sub(c, a))
    lb = Fraction(det2(sub(p, a), sub(c, a)), den)
    lc = Fraction(det2(sub(b, a), sub(p, a)), den)
    return 1 - lb - lc, lb, lc


def regularity_lift(points: list[Vec], tris: frozenset) -> Optional[dict[Vec, Fraction]]:
    """A lift whose upper hull induces ``tris``, or ``None`` if there is none.

    Folding across every interior edge is required to be strictly concave,
    which is equivalent to regularity for a triangulation of a convex region.
    """
    index = {p: i for i, p in enumerate(points)}
    system = LinearSystem(len(points))
    for edge, (t1, t2) in sorted(_interior_edges(tris).items()):
        d = _opposite(t2, edge)
        row = [Fraction(0)] * len(points)
        for lam, p in zip(_affine_coords(d, t1), t1):
            row[index[p]] += lam
        row[index[d]] -= 1
        system.gts.append((row, Fraction(0)))
    res = strictly_feasible(system, with_certificate=False)
    if not res.feasible:
        return None
    return {p: res.point[index[p]] for p in points}


def _initial(points: list[Vec]) -> frozenset:
    for k in range(1, 200):
        lift = {
            p: Fraction(-1000 * (p[0] ** 2 + p[1] ** 2) - (37 * p[0] + 101 * p[1] + k * p[0] * p[1]) % 17)
            for p in points
        }
        s = L.regular_subdivision(LiftedConfiguration.of(lift))
        if s.is_unimodular_triangulation():
            return _as_triangles(s)
    raise AssertionError("no generic lift found")  # pragma: no cover


def regular_unimodular_triangulations(polygon: LatticePolygon) -> list[Subdivision]:
    """All regular unimodular triangulations, in canonical order."""
    if polygon.dim != 2:
        raise TroplaneError("DEGENERATE_DUAL", "polygon must be two-dimensional")
    points = sorted(polygon.lattice_points())
    if len(points) > MAX_LATTICE_POINTS:
        raise TroplaneError(
            "POLYGON_TOO_LARGE",
            f"{len(points)} lattice points exceeds the limit of {MAX_LATTICE_POINTS}",
            points=len(points),
        )
    start = _initial(points)
    seen = {start}
    queue = deque([start])
    while queue:
        tris = queue.popleft()
        for edge, pair in sorted(_interior_edges(tris).items()):
            nxt = _flip(tris, edge, pair)
            if nxt is None or nxt in seen:
                continue
            seen.add(nxt)
            queue.append(nxt)
    # diagonal flips connect all full triangulations of a planar point set,
    # so filter for regularity only after the search
    subs = [Subdivision.from_cells(points, tris, 2) for tris in seen if regularity_lift(points, tris) is not None]
    return sorted(subs, key=lambda s: [c.vertices for c in s.cells])
