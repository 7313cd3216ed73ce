"""Truncated Puiseux series, resultants and Newton-polygon root valuations.

A series stores its known terms below a truncation order; everything at or
above the order is unknown.  Exact series (finite sums) have order ``None``.
"""

from __future__ import annotations

import os
import random
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional, Sequence, Union

from . import lattice as L
from .curve import TropicalPolynomial, curve_of
from .errors import TroplaneError
from .intersect import Divisor, proper_intersection
from .lattice import LatticePolygon, q

INFINITY = float("inf")
DEFAULT_ORDER = 8


def _min_order(a: Optional[Fraction], b: Optional[Fraction]) -> Optional[Fraction]:
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


@dataclass(frozen=True)
class TruncatedPuiseux:
    terms: tuple[tuple[Fraction, Fraction], ...]  # (exponent, coefficient), increasing
    order: Optional[Fraction] = None

    def __post_init__(self):
        acc: dict[Fraction, Fraction] = {}
        for e, c in self.terms:
            e, c = q(e), q(c)
            acc[e] = acc.get(e, Fraction(0)) + c
        order = None if self.order is None else q(self.order)
        kept = tuple(sorted((e, c) for e, c in acc.items() if c != 0 and (order is None or e < order)))
        object.__setattr__(self, "terms", kept)
        object.__setattr__(self, "order", order)

    @classmethod
    def const(cls, c, order=None) -> "TruncatedPuiseux":
        return cls(((Fraction(0), q(c)),), order)

    @classmethod
    def monomial(cls, e, c=1, order=None) -> "TruncatedPuiseux":
        return cls(((q(e), q(c)),), order)

    @property
    def is_exact_zero(self) -> bool:
        return not self.terms and self.order is None

    @property
    def is_unknown(self) -> bool:
        """No known terms below a finite order: the series might be anything of valuation >= order."""
        return not self.terms and self.order is not None

    def valuation(self):
        if self.terms:
            return self.terms[0][0]
        if self.order is None:
            return INFINITY
        raise TroplaneError("ORDER_TOO_LOW", f"valuation is only known to be >= {self.order}", order=self.order)

    def valuation_bound(self):
        """Exact valuation, or the order when nothing is known below it."""
        if self.terms:
            return self.terms[0][0]
        return INFINITY if self.order is None else self.order

    def truncate(self, order) -> "TruncatedPuiseux":
        return TruncatedPuiseux(self.terms, _min_order(self.order, q(order)))

    def __add__(self, other: "TruncatedPuiseux") -> "TruncatedPuiseux":
        return TruncatedPuiseux(self.terms + other.terms, _min_order(self.order, other.order))

    def __neg__(self) -> "TruncatedPuiseux":
        return TruncatedPuiseux(tuple((e, -c) for e, c in self.terms), self.order)

    def __sub__(self, other: "TruncatedPuiseux") -> "TruncatedPuiseux":
        return self + (-other)

    def __mul__(self, other: "TruncatedPuiseux") -> "TruncatedPuiseux":
        if self.is_exact_zero or other.is_exact_zero:
            return TruncatedPuiseux(())
        order = None
        if self.order is not None:
            order = self.order + other.valuation_bound()
        if other.order is not None:
            bound = other.order + self.valuation_bound()
            order = bound if order is None else min(order, bound)
        if order == INFINITY:
            order = None
        terms = [(e1 + e2, c1 * c2) for e1, c1 in self.terms for e2, c2 in other.terms]
        return TruncatedPuiseux(tuple(terms), order)

    def __str__(self) -> str:
        parts = [f"{L.fmt_q(c)}*t^{L.fmt_q(e)}" for e, c in self.terms] or ["0"]
        tail = f" + O(t^{L.fmt_q(self.order)})" if self.order is not None else ""
        return " + ".join(parts) + tail


ZERO = TruncatedPuiseux(())
ONE = TruncatedPuiseux.const(1)

Exponent = tuple[int, int]


@dataclass(frozen=True)
class PuiseuxPolynomial:
    """Bivariate Laurent polynomial with truncated Puiseux coefficients."""

    terms: tuple[tuple[Exponent, TruncatedPuiseux], ...]

    def __post_init__(self):
        acc: dict = {}
        for e, c in self.terms:
            e = (int(e[0]), int(e[1]))
            acc[e] = acc[e] + c if e in acc else c
        kept = tuple(sorted((e, c) for e, c in acc.items() if not c.is_exact_zero))
        object.__setattr__(self, "terms", kept)

    @classmethod
    def of(cls, mapping: Mapping) -> "PuiseuxPolynomial":
        return cls(tuple(mapping.items()))

    def coeff(self, e: Exponent) -> TruncatedPuiseux:
        return dict(self.terms).get(e, ZERO)

    def support(self) -> list[Exponent]:
        return [e for e, _ in self.terms]

    def newton(self) -> LatticePolygon:
        return LatticePolygon.hull_of(self.support())

    def truncate(self, order) -> "PuiseuxPolynomial":
        return PuiseuxPolynomial(tuple((e, c.truncate(order)) for e, c in self.terms))

    def __add__(self, other: "PuiseuxPolynomial") -> "PuiseuxPolynomial":
        return PuiseuxPolynomial(self.terms + other.terms)

    def __neg__(self) -> "PuiseuxPolynomial":
        return PuiseuxPolynomial(tuple((e, -c) for e, c in self.terms))

    def __sub__(self, other: "PuiseuxPolynomial") -> "PuiseuxPolynomial":
        return self + (-other)

    def __mul__(self, other: "PuiseuxPolynomial") -> "PuiseuxPolynomial":
        out = []
        for e1, c1 in self.terms:
            for e2, c2 in other.terms:
                out.append(((e1[0] + e2[0], e1[1] + e2[1]), c1 * c2))
        return PuiseuxPolynomial(tuple(out))

    def scale(self, s: TruncatedPuiseux) -> "PuiseuxPolynomial":
        return PuiseuxPolynomial(tuple((e, c * s) for e, c in self.terms))

    def tropicalize(self) -> TropicalPolynomial:
        """Tropical polynomial ``max(<e, w> - val(c_e))``."""
        return TropicalPolynomial(tuple((e, c.valuation()) for e, c in self.terms))


# ---------------------------------------------------------------------------
# univariate polynomials over series, and resultants

UniPoly = dict  # degree -> TruncatedPuiseux


def _uni_mul(a: UniPoly, b: UniPoly) -> UniPoly:
    out: UniPoly = {}
    for i, c in a.items():
        for j, d in b.items():
            out[i + j] = out[i + j] + c * d if i + j in out else c * d
    return {k: v for k, v in out.items() if not v.is_exact_zero}


def _uni_add(a: UniPoly, b: UniPoly) -> UniPoly:
    out = dict(a)
    for k, v in b.items():
        out[k] = out[k] + v if k in out else v
    return {k: v for k, v in out.items() if not v.is_exact_zero}


def _uni_neg(a: UniPoly) -> UniPoly:
    return {k: -v for k, v in a.items()}


def _determinant(matrix: list[list[UniPoly]]) -> UniPoly:
    """Cofactor expansion along the first row; no division is needed."""
    n = len(matrix)
    if n == 1:
        return matrix[0][0]
    total: UniPoly = {}
    for j, entry in enumerate(matrix[0]):
        if not entry:
            continue
        minor = [row[:j] + row[j + 1 :] for row in matrix[1:]]
        term = _uni_mul(entry, _determinant(minor))
        total = _uni_add(total, term if j % 2 == 0 else _uni_neg(term))
    return total


def _as_polynomial_in(f: PuiseuxPolynomial, var: int) -> list[UniPoly]:
    """Coefficients of ``f`` in the variable ``var`` (0 = x, 1 = y), shifted to start at degree 0."""
    if not f.terms:
        return []
    lo_main = min(e[var] for e, _ in f.terms)
    lo_other = min(e[1 - var] for e, _ in f.terms)
    deg = max(e[var] for e, _ in f.terms) - lo_main
    coeffs: list[UniPoly] = [{} for _ in range(deg + 1)]
    for e, c in f.terms:
        coeffs[e[var] - lo_main] = _uni_add(coeffs[e[var] - lo_main], {e[1 - var] - lo_other: c})
    return coeffs


def resultant(f: PuiseuxPolynomial, g: PuiseuxPolynomial, eliminate: str = "y") -> UniPoly:
    """Sylvester resultant; the result is a polynomial in the remaining variable."""
    var = {"x": 0, "y": 1}[eliminate]
    a, b = _as_polynomial_in(f, var), _as_polynomial_in(g, var)
    m, n = len(a) - 1, len(b) - 1
    if m < 1 and n < 1:
        raise TroplaneError("PARSE_ERROR", f"neither polynomial involves {eliminate}")
    size = m + n
    rows = []
    for i in range(n):
        row = [{} for _ in range(size)]
        for k, c in enumerate(reversed(a)):
            row[i + k] = c
        rows.append(row)
    for i in range(m):
        row = [{} for _ in range(size)]
        for k, c in enumerate(reversed(b)):
            row[i + k] = c
        rows.append(row)
    return _determinant(rows)


def coefficient_valuations(p: UniPoly) -> dict[int, object]:
    return {k: v.valuation() for k, v in sorted(p.items())}


def root_valuations(p: Union[UniPoly, Sequence[TruncatedPuiseux]]) -> list[Fraction]:
    """Valuations of the nonzero roots, from the lower Newton polygon.

    Coefficients whose valuation is unknown must lie on or above the hull of
    the known points, otherwise ``ORDER_TOO_LOW``.
    """
    if not isinstance(p, dict):
        p = dict(enumerate(p))
    p = {k: v for k, v in p.items() if not v.is_exact_zero}
    if not p:
        raise TroplaneError("ZERO_POLYNOMIAL", "the zero polynomial has no finite root set")
    known = {k: v.valuation() for k, v in p.items() if not v.is_unknown}
    unknown = {k: v.order for k, v in p.items() if v.is_unknown}
    if 0 not in p:
        raise TroplaneError("ZERO_ROOT", "constant term vanishes, so 0 is a root")
    lo, hi = 0, max(p)
    if lo in unknown or hi in unknown:
        raise TroplaneError("ORDER_TOO_LOW", "extreme coefficients are not certified at this order")
    pts = sorted(known.items())
    hull: list = []
    for x, y in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (y2 - y1) * (x - x1) >= (y - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append((x, y))
    for k, bound in unknown.items():
        for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
            if x1 <= k <= x2:
                line = y1 + (y2 - y1) * Fraction(k - x1, x2 - x1)
                if bound < line:
                    raise TroplaneError(
                        "ORDER_TOO_LOW", f"coefficient of degree {k} could lower the Newton polygon", degree=k
                    )
                break
    out = []
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        slope = Fraction(y2 - y1) / (x2 - x1)
        out += [-slope] * (x2 - x1)
    return sorted(out)


# ---------------------------------------------------------------------------
# symbolic coefficients and generic instantiation

_SYMBOL_TERM = re.compile(r"\s*([+-]?)\s*(?:(\d+(?:/\d+)?)\s*\*?\s*)?([A-Za-z_]\w*)?\s*")


def _parse_linear(text: str) -> dict[Optional[str], Fraction]:
    """Parse ``"a+beta"``, ``"-2*gamma"``, ``"3/2"`` into symbol coefficients."""
    text = text.strip()
    if not text:
        raise TroplaneError("PARSE_ERROR", "empty coefficient")
    out: dict[Optional[str], Fraction] = {}
    pos = 0
    while pos < len(text):
        m = _SYMBOL_TERM.match(text, pos)
        if not m or m.end() == pos or (m.group(2) is None and m.group(3) is None):
            raise TroplaneError("PARSE_ERROR", f"cannot parse coefficient {text!r}", position=pos)
        sign = -1 if m.group(1) == "-" else 1
        num = Fraction(m.group(2)) if m.group(2) else Fraction(1)
        out[m.group(3)] = out.get(m.group(3), Fraction(0)) + sign * num
        pos = m.end()
        if pos < len(text) and text[pos] not in "+-":
            raise TroplaneError("PARSE_ERROR", f"cannot parse coefficient {text!r}", position=pos)
    return out


@dataclass(frozen=True)
class SymbolicPolynomial:
    """Polynomial whose coefficients are t-polynomials with symbolic linear coefficients."""

    terms: tuple[tuple[Exponent, tuple[tuple[Fraction, tuple], ...]], ...]

    @property
    def symbols(self) -> list[str]:
        names = set()
        for _, coeff in self.terms:
            for _, lin in coeff:
                names |= {s for s, _ in lin if s is not None}
        return sorted(names)

    def instantiate(self, values: Mapping[str, int], order=None) -> PuiseuxPolynomial:
        out = []
        for e, coeff in self.terms:
            series = []
            for te, lin in coeff:
                c = sum((v * (1 if s is None else values[s]) for s, v in lin), Fraction(0))
                series.append((te, c))
            out.append((e, TruncatedPuiseux(tuple(series), order)))
        return PuiseuxPolynomial(tuple(out))


def parse_puiseux(data: Mapping) -> SymbolicPolynomial:
    """``{"terms": [{"exp": [i, j], "coeff": [{"e": "q", "c": "p/q" or "a+beta"}]}]}``."""
    try:
        terms = []
        for t in data["terms"]:
            e = (int(t["exp"][0]), int(t["exp"][1]))
            coeff = []
            for piece in t["coeff"]:
                lin = _parse_linear(str(piece["c"]))
                coeff.append((q(str(piece.get("e", 0))), tuple(sorted(lin.items(), key=lambda kv: (kv[0] is not None, kv[0] or "")))))
            terms.append((e, tuple(coeff)))
    except (KeyError, TypeError, IndexError, ValueError) as exc:
        if isinstance(exc, TroplaneError):
            raise
        raise TroplaneError("PARSE_ERROR", f"malformed Puiseux polynomial: {exc}") from exc
    return SymbolicPolynomial(tuple(terms))


def sample_symbols(names: Sequence[str], rng: random.Random) -> dict[str, int]:
    """Distinct integers in [2, 97] standing in for generic valuation-0 constants."""
    picks = rng.sample(range(2, 98), len(names))
    return dict(zip(names, picks))


def default_seed() -> int:
    return int(os.environ.get("TROPLANE_SEED", "0"))


# ---------------------------------------------------------------------------
# tropicalized intersections

@dataclass(frozen=True)
class Unpaired:
    x_values: tuple[Fraction, ...]
    y_values: tuple[Fraction, ...]

    def to_json(self) -> dict:
        return {"status": "UNPAIRED", "x": [L.fmt_q(v) for v in self.x_values], "y": [L.fmt_q(v) for v in self.y_values]}


def _tropical_coordinates(f: PuiseuxPolynomial, g: PuiseuxPolynomial):
    xs = tuple(sorted(-v for v in root_valuations(resultant(f, g, "y"))))
    ys = tuple(sorted(-v for v in root_valuations(resultant(f, g, "x"))))
    return xs, ys


def _pair(f: PuiseuxPolynomial, g: PuiseuxPolynomial, xs, ys):
    if len(xs) != len(ys):
        return Unpaired(xs, ys)
    if len(set(xs)) <= 1 or len(set(ys)) <= 1:
        return Divisor(tuple(((x, y), 1) for x, y in zip(xs, ys)))
    try:
        D = proper_intersection(curve_of(f.tropicalize()), curve_of(g.tropicalize()))
    except TroplaneError:
        return Unpaired(xs, ys)
    projected_x = sorted(p[0] for p, m in D.chips for _ in range(m))
    projected_y = sorted(p[1] for p, m in D.chips for _ in range(m))
    if tuple(projected_x) != xs or tuple(projected_y) != ys:
        return Unpaired(xs, ys)
    return D


def tropicalize_intersection(
    f: Union[SymbolicPolynomial, PuiseuxPolynomial],
    g: Union[SymbolicPolynomial, PuiseuxPolynomial],
    trials: int = 3,
    order=DEFAULT_ORDER,
    seed: Optional[int] = None,
):
    """Tropicalization of ``V(f) \\cap V(g)`` from resultant root valuations.

    Symbolic constants are sampled ``trials`` times; every sample has to give
    the same answer.
    """
    rng = random.Random(default_seed() if seed is None else seed)
    names = sorted(set(getattr(f, "symbols", [])) | set(getattr(g, "symbols", [])))
    results = []
    samples = []
    for _ in range(max(1, trials)):
        values = sample_symbols(names, rng)
        fi = f.instantiate(values, order) if isinstance(f, SymbolicPolynomial) else f.truncate(order)
        gi = g.instantiate(values, order) if isinstance(g, SymbolicPolynomial) else g.truncate(order)
        xs, ys = _tropical_coordinates(fi, gi)
        results.append(_pair(fi, gi, xs, ys))
        samples.append(values)
    if any(r != results[0] for r in results[1:]):
        raise TroplaneError("GENERICITY_FAILURE", "samples of the generic constants disagree", samples=[str(s) for s in samples])
    return results[0]


# ---------------------------------------------------------------------------
# replacing a curve by one with the same tropicalization

@dataclass(frozen=True)
class ShiftReport:
    h: PuiseuxPolynomial
    r: int
    equal: bool
    minimal_r: int
    sufficient_r: int

    def to_json(self) -> dict:
        return {"r": self.r, "equal": self.equal, "minimal_r": self.minimal_r, "sufficient_r": self.sufficient_r}


def _same_tropical_curve(a: PuiseuxPolynomial, b: PuiseuxPolynomial) -> bool:
    return curve_of(a.tropicalize()).geometry_key() == curve_of(b.tropicalize()).geometry_key()


def _upper_hull_value(trop: TropicalPolynomial, e: Exponent) -> Fraction:
    """Value at ``e`` of the concave hull of the lifts ``-val``."""
    from .lattice import regular_subdivision, _plane_through

    cfg = trop.lifted()
    lift = cfg.lift()
    sub_ = regular_subdivision(cfg)
    for cell in sub_.cells:
        if L.polygon_contains(cell.vertices, e):
            a, b, c = cell.vertices[:3]
            pa, pb, pc = _plane_through((*a, lift[a]), (*b, lift[b]), (*c, lift[c]))
            return pa * e[0] + pb * e[1] + pc
    raise AssertionError("point outside the polygon")  # pragma: no cover


def sufficient_shift(f1: PuiseuxPolynomial, f2: PuiseuxPolynomial) -> int:
    """Least integer ``r`` for which every term of ``t^r f2`` is strictly dominated by ``f1``."""
    trop1 = f1.tropicalize()
    need = 0
    for e, c in f2.terms:
        v2 = c.valuation()
        if e in f1.support():
            bound = f1.coeff(e).valuation() - v2  # need r > bound
        else:
            bound = -_upper_hull_value(trop1, e) - v2  # need -(r + v2) < hull
        r = int(bound // 1) + 1
        need = max(need, r)
    return need


def lemma31_witness(f1: PuiseuxPolynomial, f2: PuiseuxPolynomial, r: int) -> ShiftReport:
    """``h = f1 + t^r f2`` and whether its tropical curve equals that of ``f1``."""
    if not all(f1.newton().contains(e) for e in f2.support()):
        raise TroplaneError("NEWTON_NOT_CONTAINED", "Newton polygon of f2 is not inside that of f1")

    def shifted(k: int) -> PuiseuxPolynomial:
        return f1 + f2.scale(TruncatedPuiseux.monomial(k))

    sufficient = sufficient_shift(f1, f2)
    minimal = sufficient
    while minimal > 0 and _same_tropical_curve(shifted(minimal - 1), f1):
        minimal -= 1
    h = shifted(r)
    return ShiftReport(h, r, _same_tropical_curve(h, f1), minimal, sufficient)
