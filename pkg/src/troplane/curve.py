"""Tropical plane curves: construction, combinatorics and metric structure.

A curve is stored together with its dual subdivision.  Vertex ``i`` is dual to
``dual.cells[i]``, so two curves built over the same subdivision share vertex
numbering; the realizability code relies on that bijection.
"""

from __future__ import annotations

import json
import re
from collections import deque
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence, Union

from . import lattice as L
from .errors import TroplaneError
from .lattice import (
    LatticePolygon,
    LiftedConfiguration,
    Point,
    Subdivision,
    Vec,
    det2,
    dot,
    primitive,
    q,
)


# ---------------------------------------------------------------------------
# polynomials

@dataclass(frozen=True)
class TropicalPolynomial:
    """Exponent -> coefficient valuation.  Evaluates as max(<e, w> - val)."""

    terms: tuple[tuple[Vec, Fraction], ...]

    def __post_init__(self):
        if not self.terms:
            raise TroplaneError("PARSE_ERROR", "a tropical polynomial needs at least one term")
        seen = set()
        clean = []
        for e, v in self.terms:
            e = (int(e[0]), int(e[1]))
            if e in seen:
                raise TroplaneError("DUPLICATE_EXPONENT", f"exponent {list(e)} appears twice", exponent=list(e))
            seen.add(e)
            clean.append((e, q(v)))
        object.__setattr__(self, "terms", tuple(sorted(clean)))

    @classmethod
    def of(cls, mapping: Mapping) -> "TropicalPolynomial":
        return cls(tuple(mapping.items()))

    def valuations(self) -> dict[Vec, Fraction]:
        return dict(self.terms)

    def lifted(self) -> LiftedConfiguration:
        return LiftedConfiguration(tuple((e, -v) for e, v in self.terms))

    def newton(self) -> LatticePolygon:
        return LatticePolygon.hull_of(e for e, _ in self.terms)

    def __call__(self, w: Sequence) -> Fraction:
        return max(dot(e, w) - v for e, v in self.terms)

    def dominant(self, w: Sequence) -> list[Vec]:
        vals = {e: dot(e, w) - v for e, v in self.terms}
        top = max(vals.values())
        return sorted(e for e, val in vals.items() if val == top)


_TOKEN = re.compile(r"\s*(?:(?P<num>\d+(?:/\d+)?(?:\.\d+)?)|(?P<var>[txy])|(?P<op>[-+*^()]))")


def parse_polynomial(source: Union[str, Mapping]) -> TropicalPolynomial:
    """Parse a polynomial from JSON (dict or text) or from infix text.

    JSON: ``{"terms": [{"exp": [i, j], "val": "p/q"}, ...]}``.
    Text: ``t + x + y + t*x*y``; powers of ``t`` give the valuation
    (``t^(1/2)``, ``t^-1``), nonzero numeric constants are valuation 0.
    """
    if isinstance(source, Mapping):
        return _parse_json(source)
    text = source.strip()
    if text.startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise TroplaneError("PARSE_ERROR", str(exc), position=exc.pos) from exc
        return _parse_json(data)
    return _parse_text(text)


def _parse_json(data: Mapping) -> TropicalPolynomial:
    terms = data.get("terms") if isinstance(data, Mapping) else None
    if not isinstance(terms, list) or not terms:
        raise TroplaneError("PARSE_ERROR", "expected a nonempty 'terms' list", position=0)
    out = []
    for k, t in enumerate(terms):
        try:
            e = t["exp"]
            if len(e) != 2 or not all(isinstance(c, int) and not isinstance(c, bool) for c in e):
                raise TypeError
            out.append(((e[0], e[1]), q(str(t["val"]) if isinstance(t["val"], (int, str)) else t["val"])))
        except (KeyError, TypeError) as exc:
            raise TroplaneError("PARSE_ERROR", f"malformed term #{k}", position=k) from exc
    return TropicalPolynomial(tuple(out))


def _parse_text(text: str) -> TropicalPolynomial:
    toks = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            raise TroplaneError("PARSE_ERROR", f"unexpected character {text[pos]!r}", position=pos)
        kind = m.lastgroup
        toks.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    toks.append(("end", "", len(text)))
    i = 0

    def peek():
        return toks[i]

    def take(kind=None, val=None):
        nonlocal i
        tok = toks[i]
        if (kind and tok[0] != kind) or (val and tok[1] != val):
            raise TroplaneError("PARSE_ERROR", f"unexpected {tok[1] or 'end of input'!r}", position=tok[2])
        i += 1
        return tok

    def exponent(rational: bool):
        sign = 1
        if peek()[1] == "(":
            take("op", "(")
            value = exponent(rational)
            take("op", ")")
            return value
        if peek()[1] == "-":
            take()
            sign = -1
        tok = take("num")
        value = Fraction(tok[1])
        if not rational and value.denominator != 1:
            raise TroplaneError("PARSE_ERROR", "monomial exponents must be integers", position=tok[2])
        return sign * value

    terms: list = []
    while True:
        if peek()[1] in "+-" and peek()[0] == "op":
            take()
        val, ex, ey = Fraction(0), 0, 0
        nfactors = 0
        while True:
            kind, v, p = peek()
            if kind == "num":
                take()
                if Fraction(v) == 0:
                    raise TroplaneError("PARSE_ERROR", "zero coefficient", position=p)
            elif kind == "var":
                take()
                power = Fraction(1)
                if peek()[1] == "^":
                    take()
                    power = exponent(v == "t")
                if v == "t":
                    val += power
                elif v == "x":
                    ex += int(power)
                else:
                    ey += int(power)
            else:
                break
            nfactors += 1
            if peek()[1] == "*":
                take()
        if nfactors == 0:
            raise TroplaneError("PARSE_ERROR", "empty term", position=peek()[2])
        terms.append(((ex, ey), val))
        if peek()[0] == "end":
            break
        if peek()[1] not in "+-":
            raise TroplaneError("PARSE_ERROR", f"unexpected {peek()[1]!r}", position=peek()[2])
    return TropicalPolynomial(tuple(terms))


# ---------------------------------------------------------------------------
# curves

@dataclass(frozen=True)
class Edge:
    u: int
    v: int
    direction: Vec  # primitive, from u to v
    length: Fraction
    weight: int
    dual: tuple[Vec, Vec]


@dataclass(frozen=True)
class Ray:
    vertex: int
    direction: Vec
    weight: int
    dual: tuple[Vec, Vec]


@dataclass(frozen=True)
class Piece:
    """A closed segment or ray of a curve, in a form the intersection code uses."""

    kind: str  # "e" or "r"
    index: int
    start: Point
    direction: Vec
    length: Optional[Fraction]  # None for rays
    weight: int

    @property
    def key(self) -> tuple[str, int]:
        return (self.kind, self.index)


@dataclass(frozen=True)
class TropicalCurve:
    vertices: tuple[Point, ...]
    bounded_edges: tuple[Edge, ...]
    rays: tuple[Ray, ...]
    dual: Subdivision
    newton: LatticePolygon

    @property
    def degree_of_self_intersection(self) -> Fraction:
        return L.mixed_volume(self.newton, self.newton)

    def incident(self, i: int) -> list[tuple[str, int, Vec, int]]:
        """Edges at vertex ``i`` as ``(kind, index, outgoing direction, weight)``."""
        out = []
        for k, e in enumerate(self.bounded_edges):
            if e.u == i:
                out.append(("e", k, e.direction, e.weight))
            if e.v == i:
                out.append(("e", k, (-e.direction[0], -e.direction[1]), e.weight))
        for k, r in enumerate(self.rays):
            if r.vertex == i:
                out.append(("r", k, r.direction, r.weight))
        return out

    def neighbors(self, i: int) -> list[tuple[int, int]]:
        """``(edge index, neighbor vertex)`` pairs."""
        out = []
        for k, e in enumerate(self.bounded_edges):
            if e.u == i:
                out.append((k, e.v))
            elif e.v == i:
                out.append((k, e.u))
        return out

    def pieces(self) -> list[Piece]:
        out = [
            Piece("e", k, self.vertices[e.u], e.direction, e.length, e.weight)
            for k, e in enumerate(self.bounded_edges)
        ]
        out += [
            Piece("r", k, self.vertices[r.vertex], r.direction, None, r.weight)
            for k, r in enumerate(self.rays)
        ]
        return out

    def edge_lengths(self) -> list[Fraction]:
        return [e.length for e in self.bounded_edges]

    def geometry_key(self):
        """Hashable description of the underlying weighted set, ignoring labels."""
        edges = sorted(
            (tuple(sorted((self.vertices[e.u], self.vertices[e.v]))), e.weight) for e in self.bounded_edges
        )
        rays = sorted((self.vertices[r.vertex], r.direction, r.weight) for r in self.rays)
        return tuple(sorted(self.vertices)), tuple(edges), tuple(rays)


def skeleton(dual: Subdivision):
    """Combinatorial curve dual to a two-dimensional subdivision.

    Returns ``(edges, rays)`` with edges ``(i, j, direction i->j, weight, dual edge)``
    and rays ``(i, direction, weight, dual edge)``.
    """
    if dual.dim != 2:
        raise TroplaneError("DEGENERATE_DUAL", "skeleton needs a two-dimensional subdivision")
    edges = []
    for (a, b), i, j in dual.interior_edges():
        d = L.sub(b, a)
        n, weight = primitive((-d[1], d[0]))
        other = next(c for c in dual.cells[i].vertices if det2(d, L.sub(c, a)) != 0)
        if dot(n, L.sub(other, a)) > 0:
            n = (-n[0], -n[1])
        edges.append((i, j, n, weight, (a, b)))
    rays = []
    for i, (a, b) in dual.boundary_edges():
        d = L.sub(b, a)
        n, weight = primitive((d[1], -d[0]))
        rays.append((i, n, weight, (a, b)))
    return edges, rays


def curve_of(poly: TropicalPolynomial) -> TropicalCurve:
    """Corner locus of ``w -> max(<e, w> - val)``, built from the dual subdivision."""
    if len(poly.terms) < 2:
        raise TroplaneError("EMPTY_CURVE", "a single term attains the maximum everywhere")
    dual = L.regular_subdivision(poly.lifted())
    lift = poly.lifted().lift()
    newton = poly.newton()
    if dual.dim == 1:
        return _curve_of_1d(dual, lift, newton)
    positions = []
    for cell in dual.cells:
        a, b, c = cell.vertices[:3]
        pa, pb, _ = L._plane_through((*a, lift[a]), (*b, lift[b]), (*c, lift[c]))
        positions.append((-pa, -pb))
    edges, rays = skeleton(dual)
    bounded = []
    for i, j, n, w, de in edges:
        disp = L.sub(positions[j], positions[i])
        direction, length = L.rational_direction(disp)
        assert direction == n
        bounded.append(Edge(i, j, n, length, w, de))
    return TropicalCurve(
        tuple(positions),
        tuple(bounded),
        tuple(Ray(i, n, w, de) for i, n, w, de in rays),
        dual,
        newton,
    )


def _curve_of_1d(dual: Subdivision, lift, newton) -> TropicalCurve:
    # parallel lines, each stored as a bivalent vertex with two opposite rays
    positions, rays = [], []
    for k, cell in enumerate(dual.cells):
        a, b = cell.vertices
        d = L.sub(b, a)
        c = lift[a] - lift[b]
        norm = dot(d, d)
        positions.append((Fraction(c * d[0], norm), Fraction(c * d[1], norm)))
        n, weight = primitive((-d[1], d[0]))
        rays.append(Ray(k, n, weight, (a, b)))
        rays.append(Ray(k, (-n[0], -n[1]), weight, (a, b)))
    return TropicalCurve(tuple(positions), (), tuple(rays), dual, newton)


def assemble_curve(
    dual: Subdivision,
    base_vertex: int,
    base_position: Sequence,
    lengths: Union[Mapping[int, Fraction], Sequence[Fraction]],
) -> TropicalCurve:
    """Place the curve dual to ``dual`` from one vertex position and edge lengths.

    Positions propagate over a BFS spanning tree; each remaining edge is a
    cycle that has to close exactly.
    """
    edges, rays = skeleton(dual)
    if isinstance(lengths, Mapping):
        lens = [q(lengths[k]) for k in range(len(edges))]
    else:
        lens = [q(v) for v in lengths]
    if len(lens) != len(edges):
        raise TroplaneError("PARSE_ERROR", f"expected {len(edges)} lengths, got {len(lens)}")
    for k, v in enumerate(lens):
        if v <= 0:
            raise TroplaneError("NONPOSITIVE_LENGTH", f"edge {k} has length {v}", edge=k)
    n = len(dual.cells)
    pos: list[Optional[Point]] = [None] * n
    pos[base_vertex] = (q(base_position[0]), q(base_position[1]))
    adj: dict[int, list] = {i: [] for i in range(n)}
    for k, (i, j, d, _, _) in enumerate(edges):
        adj[i].append((k, j, d))
        adj[j].append((k, i, (-d[0], -d[1])))
    tree = set()
    queue = deque([base_vertex])
    while queue:
        i = queue.popleft()
        for k, j, d in adj[i]:
            if pos[j] is None:
                pos[j] = L.add(pos[i], L.scale(lens[k], d))
                tree.add(k)
                queue.append(j)
    for k, (i, j, d, _, _) in enumerate(edges):
        if k in tree:
            continue
        defect = L.sub(L.add(pos[i], L.scale(lens[k], d)), pos[j])
        if defect != (0, 0):
            raise TroplaneError(
                "CYCLE_NOT_CLOSED",
                f"cycle through edge {k} misses by {L.fmt_point(defect)}",
                edge=k,
                defect=L.fmt_point(defect),
            )
    return TropicalCurve(
        tuple(pos),
        tuple(Edge(i, j, d, lens[k], w, de) for k, (i, j, d, w, de) in enumerate(edges)),
        tuple(Ray(i, d, w, de) for i, d, w, de in rays),
        dual,
        dual.hull,
    )


def polynomial_of(curve: TropicalCurve) -> TropicalPolynomial:
    """A tropical polynomial whose curve is ``curve`` (valuations up to a constant)."""
    lift = L.lift_from_vertex_positions(curve.dual, curve.vertices)
    return TropicalPolynomial(tuple((e, -h) for e, h in lift.items()))


def translate(curve: TropicalCurve, eta: Sequence) -> TropicalCurve:
    shift = (q(eta[0]), q(eta[1]))
    return replace(curve, vertices=tuple(L.add(v, shift) for v in curve.vertices))


def is_smooth(curve: TropicalCurve) -> bool:
    if curve.dual.dim != 2:
        return False
    if not curve.dual.is_unimodular_triangulation():
        return False
    return all(
        len(inc) == 3 and all(w == 1 for *_, w in inc)
        for inc in (curve.incident(i) for i in range(len(curve.vertices)))
    )


def require_smooth(curve: TropicalCurve) -> None:
    if not is_smooth(curve):
        raise TroplaneError("NOT_SMOOTH", "this operation needs a smooth tropical curve")


def _components(n: int, edges: Iterable[tuple[int, int]]) -> int:
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for a, b in edges:
        parent[find(a)] = find(b)
    return len({find(a) for a in range(n)})


def genus(curve: TropicalCurve) -> int:
    n = len(curve.vertices)
    if n == 0:
        return 0
    return len(curve.bounded_edges) - n + _components(n, ((e.u, e.v) for e in curve.bounded_edges))


def check_balancing(curve: TropicalCurve) -> list[int]:
    """Vertices where the weighted primitive directions do not sum to zero."""
    bad = []
    for i in range(len(curve.vertices)):
        sx = sum(w * d[0] for _, _, d, w in curve.incident(i))
        sy = sum(w * d[1] for _, _, d, w in curve.incident(i))
        if (sx, sy) != (0, 0):
            bad.append(i)
    return bad


@dataclass(frozen=True)
class RecessionFan:
    rays: tuple[Vec, ...]

    @property
    def cones(self) -> tuple[tuple[Vec, Vec], ...]:
        n = len(self.rays)
        if n < 2:
            return ()
        return tuple((self.rays[k], self.rays[(k + 1) % n]) for k in range(n))


def recession_fan(curve: TropicalCurve) -> RecessionFan:
    if not curve.vertices:
        raise TroplaneError("EMPTY_CURVE", "empty curve has no recession fan")
    return RecessionFan(tuple(L.cyclic_sort(r.direction for r in curve.rays)))


# ---------------------------------------------------------------------------
# the cycle of a genus-one curve

@dataclass(frozen=True)
class Cycle:
    vertices: tuple[int, ...]  # counterclockwise, starting at the anchor
    edges: tuple[int, ...]  # edges[k] joins vertices[k] -> vertices[k+1]
    signs: tuple[int, ...]  # +1 if the edge is traversed u -> v
    length: Fraction

    def arclengths(self, curve: TropicalCurve) -> dict[int, Fraction]:
        out, acc = {}, Fraction(0)
        for v, k in zip(self.vertices, self.edges):
            out[v] = acc
            acc += curve.bounded_edges[k].length
        return out


def cycle_of(curve: TropicalCurve) -> Cycle:
    """The unique cycle of a genus-one curve, oriented counterclockwise.

    It starts at the lexicographically least cycle vertex, the anchor used for
    Abel-Jacobi positions.
    """
    if genus(curve) != 1:
        raise TroplaneError("WRONG_GENUS", f"curve has genus {genus(curve)}, expected 1")
    alive = set(range(len(curve.bounded_edges)))
    deg = {i: 0 for i in range(len(curve.vertices))}
    for k in alive:
        deg[curve.bounded_edges[k].u] += 1
        deg[curve.bounded_edges[k].v] += 1
    changed = True
    while changed:
        changed = False
        for k in list(alive):
            e = curve.bounded_edges[k]
            if deg[e.u] == 1 or deg[e.v] == 1:
                alive.discard(k)
                deg[e.u] -= 1
                deg[e.v] -= 1
                changed = True
    verts = sorted({curve.bounded_edges[k].u for k in alive} | {curve.bounded_edges[k].v for k in alive})
    anchor = min(verts, key=lambda i: curve.vertices[i])
    order, edges, signs = [anchor], [], []
    used: set[int] = set()
    cur = anchor
    while True:
        k = next(
            k for k in sorted(alive - used) if cur in (curve.bounded_edges[k].u, curve.bounded_edges[k].v)
        )
        e = curve.bounded_edges[k]
        used.add(k)
        edges.append(k)
        signs.append(1 if e.u == cur else -1)
        cur = e.v if e.u == cur else e.u
        if cur == anchor:
            break
        order.append(cur)
    if L.shoelace([curve.vertices[i] for i in order]) < 0:
        order = [order[0]] + order[1:][::-1]
        edges = edges[::-1]
        signs = [-s for s in signs[::-1]]
    length = sum((curve.bounded_edges[k].length for k in edges), Fraction(0))
    return Cycle(tuple(order), tuple(edges), tuple(signs), length)


# ---------------------------------------------------------------------------
# points on the curve

@dataclass(frozen=True)
class Location:
    kind: str  # "v", "e" or "r"
    index: int
    t: Fraction = Fraction(0)  # lattice distance from the start vertex


def locate(curve: TropicalCurve, p: Sequence) -> Location:
    """Where an exact point sits on the curve; vertices take precedence."""
    p = (q(p[0]), q(p[1]))
    for i, v in enumerate(curve.vertices):
        if v == p:
            return Location("v", i)
    for piece in curve.pieces():
        d = L.sub(p, piece.start)
        if det2(d, piece.direction) != 0:
            continue
        t = Fraction(dot(d, piece.direction), dot(piece.direction, piece.direction))
        if t > 0 and (piece.length is None or t < piece.length):
            return Location(piece.kind, piece.index, t)
    raise TroplaneError("POINT_NOT_ON_CURVE", f"{L.fmt_point(p)} is not on the curve", point=L.fmt_point(p))


def point_at(curve: TropicalCurve, loc: Location) -> Point:
    if loc.kind == "v":
        return curve.vertices[loc.index]
    if loc.kind == "e":
        e = curve.bounded_edges[loc.index]
        return L.add(curve.vertices[e.u], L.scale(loc.t, e.direction))
    r = curve.rays[loc.index]
    return L.add(curve.vertices[r.vertex], L.scale(loc.t, r.direction))


def on_curve(curve: TropicalCurve, p: Sequence) -> bool:
    try:
        locate(curve, p)
    except TroplaneError:
        return False
    return True


def attachment_vertices(curve: TropicalCurve, cyc: Cycle) -> dict[int, int]:
    """For every vertex, the cycle vertex its tree hangs from."""
    attach = {v: v for v in cyc.vertices}
    queue = deque(cyc.vertices)
    while queue:
        i = queue.popleft()
        for _, j in curve.neighbors(i):
            if j not in attach:
                attach[j] = attach[i]
                queue.append(j)
    return attach


def retraction(curve: TropicalCurve, p: Sequence) -> Point:
    """Closest-point retraction onto the cycle of a genus-one curve."""
    cyc = cycle_of(curve)
    loc = locate(curve, p)
    attach = attachment_vertices(curve, cyc)
    if loc.kind == "v":
        return curve.vertices[attach[loc.index]]
    if loc.kind == "e":
        if loc.index in cyc.edges:
            return point_at(curve, loc)
        return curve.vertices[attach[curve.bounded_edges[loc.index].u]]
    return curve.vertices[attach[curve.rays[loc.index].vertex]]
