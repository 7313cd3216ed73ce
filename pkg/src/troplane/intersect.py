"""Proper and stable intersections of tropical plane curves.

The stable intersection moves the second curve by ``eps * v`` for a formal
infinitesimal ``eps``.  Every quantity involved is affine in ``eps``, so it is
kept as a pair ``(value, drift)`` and compared lexicographically.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Iterable, Iterator, Mapping, Optional, Sequence, Union

from . import lattice as L
from .curve import Piece, TropicalCurve, on_curve
from .errors import TroplaneError
from .lattice import Point, Vec, det2, dot, q

AUTO = "auto"


@dataclass(frozen=True)
class EpsilonPoint:
    value: Point
    drift: Point

    def at(self, eps) -> Point:
        return L.add(self.value, L.scale(q(eps), self.drift))


@dataclass(frozen=True)
class Divisor:
    """Finite formal sum of points with nonzero integer multiplicities."""

    chips: tuple[tuple[Point, int], ...]
    host: Optional[TropicalCurve] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        acc: dict[Point, int] = {}
        for p, m in self.chips:
            p = (q(p[0]), q(p[1]))
            acc[p] = acc.get(p, 0) + int(m)
        object.__setattr__(self, "chips", tuple(sorted((p, m) for p, m in acc.items() if m != 0)))
        if self.host is not None:
            for p, _ in self.chips:
                if not on_curve(self.host, p):
                    raise TroplaneError(
                        "POINT_NOT_ON_CURVE", f"chip {L.fmt_point(p)} is off the host curve", point=L.fmt_point(p)
                    )

    @classmethod
    def of(cls, mapping: Union[Mapping, Iterable], host: Optional[TropicalCurve] = None) -> "Divisor":
        items = mapping.items() if isinstance(mapping, Mapping) else ((p, 1) for p in mapping)
        return cls(tuple(items), host)

    @property
    def degree(self) -> int:
        return sum(m for _, m in self.chips)

    @property
    def support(self) -> list[Point]:
        return [p for p, _ in self.chips]

    def as_dict(self) -> dict[Point, int]:
        return dict(self.chips)

    def is_effective(self) -> bool:
        return all(m > 0 for _, m in self.chips)

    def on(self, host: TropicalCurve) -> "Divisor":
        return Divisor(self.chips, host)

    def __add__(self, other: "Divisor") -> "Divisor":
        return Divisor(self.chips + other.chips, self.host or other.host)

    def __neg__(self) -> "Divisor":
        return Divisor(tuple((p, -m) for p, m in self.chips), self.host)

    def __sub__(self, other: "Divisor") -> "Divisor":
        return self + (-other)

    def to_json(self) -> dict:
        return {"chips": [{"pt": L.fmt_point(p), "mult": m} for p, m in self.chips]}


@dataclass(frozen=True)
class Crossing:
    point: Point
    multiplicity: int
    first: tuple[str, int]  # piece key on the fixed curve
    second: tuple[str, int]  # piece key on the moving curve
    position: EpsilonPoint


class _Degenerate(Exception):
    def __init__(self, witness: dict):
        self.witness = witness


def _lex_sign(value, drift) -> int:
    if value != 0:
        return 1 if value > 0 else -1
    if drift != 0:
        return 1 if drift > 0 else -1
    return 0


def _pair_crossing(a: Piece, b: Piece, v: Vec) -> Optional[tuple[Fraction, Fraction, Fraction, Fraction, int]]:
    """Crossing of piece ``a`` with piece ``b`` moved by ``eps * v``.

    Returns ``(r0, r1, s0, s1, |det|)`` with ``r`` the lattice parameter on
    ``a`` and ``s`` on ``b``, or ``None`` if they miss for small ``eps > 0``.
    """
    ua, ub = a.direction, b.direction
    c0 = L.sub(b.start, a.start)
    D = det2(ua, (-ub[0], -ub[1]))
    if D == 0:
        _parallel_overlap(a, b, v, c0)
        return None
    mub = (-ub[0], -ub[1])
    # cheap sign tests on the numerators reject most pairs before any division
    sg = 1 if D > 0 else -1
    nr0, nr1 = det2(c0, mub), det2(v, mub)
    sr = _lex_sign(sg * nr0, sg * nr1)
    if sr < 0:
        return None
    ns0, ns1 = det2(ua, c0), det2(ua, v)
    ss = _lex_sign(sg * ns0, sg * ns1)
    if ss < 0:
        return None
    r0, r1 = Fraction(nr0) / D, Fraction(nr1, D)
    s0, s1 = Fraction(ns0) / D, Fraction(ns1, D)
    signs = [sr, ss]
    if a.length is not None:
        signs.append(_lex_sign(a.length - r0, -r1))
    if b.length is not None:
        signs.append(_lex_sign(b.length - s0, -s1))
    if min(signs) < 0:
        return None
    if 0 in signs:
        raise _Degenerate(
            {
                "kind": "vertex_on_curve",
                "pieces": [list(a.key), list(b.key)],
                "point": L.fmt_point(L.add(a.start, L.scale(r0, ua))),
            }
        )
    return r0, r1, s0, s1, abs(D)


def _parallel_overlap(a: Piece, b: Piece, v: Vec, c0) -> None:
    ua = a.direction
    if det2(ua, c0) != 0 or det2(ua, v) != 0:
        return
    # collinear for every eps: compare parameter intervals along ua
    nn = dot(ua, ua)
    t0 = (Fraction(dot(c0, ua), nn), Fraction(dot(v, ua), nn))
    sign = 1 if dot(b.direction, ua) > 0 else -1
    lo_a, hi_a = (Fraction(0), Fraction(0)), (None if a.length is None else (a.length, Fraction(0)))
    if b.length is None:
        end_b = None
    else:
        end_b = (t0[0] + sign * b.length, t0[1])
    if sign > 0:
        lo_b, hi_b = t0, end_b
    else:
        lo_b, hi_b = end_b, t0
    lo = max(lo_a, lo_b) if lo_b is not None else lo_a
    his = [h for h in (hi_a, hi_b) if h is not None]
    hi = min(his) if his else None
    if hi is None or lo <= hi:
        start = L.add(a.start, L.scale(lo[0], ua))
        raise _Degenerate({"kind": "overlap", "pieces": [list(a.key), list(b.key)], "point": L.fmt_point(start)})


def crossings_of_pieces(first: Sequence[Piece], second: Sequence[Piece], v: Sequence[int]) -> list[Crossing]:
    """All transverse crossings of ``first`` with ``second + eps*v``.

    Raises ``DEGENERATE_DIRECTION`` when some crossing sits at a vertex or two
    pieces overlap for every small ``eps``.
    """
    v = (int(v[0]), int(v[1]))
    out = []
    try:
        for a in first:
            for b in second:
                hit = _pair_crossing(a, b, v)
                if hit is None:
                    continue
                r0, r1, _, _, det = hit
                pos = EpsilonPoint(L.add(a.start, L.scale(r0, a.direction)), L.scale(r1, a.direction))
                out.append(Crossing(pos.value, a.weight * b.weight * det, a.key, b.key, pos))
    except _Degenerate as exc:
        raise TroplaneError(
            "DEGENERATE_DIRECTION", f"direction {list(v)} is not generic for this pair", witness=exc.witness
        ) from None
    return out


def crossings(curve_a: TropicalCurve, curve_b: TropicalCurve, v: Sequence[int]) -> list[Crossing]:
    return crossings_of_pieces(curve_a.pieces(), curve_b.pieces(), v)


def candidate_directions() -> Iterator[Vec]:
    """Primitive vectors by increasing max-norm, in a fixed order."""
    n = 1
    while True:
        ring = sorted(
            (a, b)
            for a in range(-n, n + 1)
            for b in range(-n, n + 1)
            if max(abs(a), abs(b)) == n and gcd(a, b) == 1
        )
        yield from ring
        n += 1


def generic_direction(pieces_a: Sequence[Piece], pieces_b: Sequence[Piece]) -> Vec:
    """First candidate that avoids every piece direction and gives a proper perturbation."""
    dirs = {p.direction for p in itertools.chain(pieces_a, pieces_b)}
    for v in candidate_directions():
        if any(det2(v, d) == 0 for d in dirs):
            continue
        try:
            crossings_of_pieces(pieces_a, pieces_b, v)
        except TroplaneError:
            continue
        return v
    raise AssertionError("unreachable")  # pragma: no cover


def _collect(cs: Iterable[Crossing]) -> tuple[tuple[Point, int], ...]:
    return tuple((c.point, c.multiplicity) for c in cs)


def proper_intersection(curve_a: TropicalCurve, curve_b: TropicalCurve) -> Divisor:
    """Intersection of two curves meeting only in transverse edge crossings."""
    try:
        cs = crossings(curve_a, curve_b, (0, 0))
    except TroplaneError as exc:
        raise TroplaneError(
            "NOT_PROPER", "the curves do not meet properly", witness=exc.details.get("witness")
        ) from None
    return Divisor(_collect(cs))


def stable_intersection(
    curve_a: TropicalCurve, curve_b: TropicalCurve, v: Union[str, Sequence[int]] = AUTO
) -> Divisor:
    pa, pb = curve_a.pieces(), curve_b.pieces()
    if isinstance(v, str):
        if v != AUTO:
            raise TroplaneError("PARSE_ERROR", f"unknown direction {v!r}")
        v = generic_direction(pa, pb)
    if tuple(v) == (0, 0):
        raise TroplaneError("DEGENERATE_DIRECTION", "the zero vector is never generic")
    return Divisor(_collect(crossings_of_pieces(pa, pb, v)))


def self_intersection(curve: TropicalCurve) -> Divisor:
    return stable_intersection(curve, curve, AUTO).on(curve)


def subdivide_piece(pieces: Sequence[Piece], key: tuple[str, int], t) -> list[Piece]:
    """Split one piece at lattice parameter ``t`` (for refinement checks)."""
    t = q(t)
    out = []
    for p in pieces:
        if p.key != key:
            out.append(p)
            continue
        if t <= 0 or (p.length is not None and t >= p.length):
            raise TroplaneError("PARSE_ERROR", "split point must lie inside the piece")
        mid = L.add(p.start, L.scale(t, p.direction))
        out.append(Piece(p.kind, p.index, p.start, p.direction, t, p.weight))
        rest = None if p.length is None else p.length - t
        out.append(Piece(p.kind + "'", p.index, mid, p.direction, rest, p.weight))
    return out
