"""Named curves and divisors used in examples, tests and the CLI."""

from __future__ import annotations

from fractions import Fraction as F

from .curve import TropicalCurve, assemble_curve, curve_of, parse_polynomial
from .intersect import Divisor
from .lattice import LiftedConfiguration, regular_subdivision


def unit_square_curve() -> TropicalCurve:
    """``t + x + y + t x y``: vertices (-1,-1), (1,1) joined by a diagonal edge."""
    return curve_of(parse_polynomial("t + x + y + t*x*y"))


def square_cycle_curve() -> TropicalCurve:
    """Genus-one curve with a square cycle on (+-1, +-1) over the diamond polygon."""
    return curve_of(parse_polynomial("t*x + t*y + x*y + t*x^2*y + t*x*y^2"))


def tropical_line() -> TropicalCurve:
    return curve_of(parse_polynomial("1 + x + y"))


def unit_square_witness(first, length) -> TropicalCurve:
    """Curve over the diagonal triangulation of the unit square."""
    base = unit_square_curve()
    return assemble_curve(base.dual, 0, first, [length])


def anti_diagonal_curve(first, length) -> TropicalCurve:
    """Curve over the other triangulation of the unit square; ``first`` is its upper-left vertex."""
    dual = regular_subdivision(LiftedConfiguration.of({(0, 0): 0, (1, 1): 0, (1, 0): -1, (0, 1): -1}))
    curve = assemble_curve(dual, 0, (0, 0), [length])
    idx = min(range(2), key=lambda i: curve.vertices[i][0])
    return assemble_curve(dual, idx, first, [length])


def rectangle_over_diamond(left, right, top, bottom) -> TropicalCurve:
    """Genus-one curve whose cycle is the axis-parallel rectangle with these sides."""
    base = square_cycle_curve()
    lower_left = (F(left), F(bottom))
    width, height = F(right) - F(left), F(top) - F(bottom)
    lengths = []
    for e in base.bounded_edges:
        lengths.append(width if e.direction == (1, 0) else height)
    return assemble_curve(base.dual, 0, lower_left, lengths)


def equal_speed_parameters():
    return {"eps": F(1, 4), "delta3": F(1, 2), "delta4": F(3, 4), "R": F(2)}


def equal_speed_divisor(eps, delta3, delta4) -> Divisor:
    """Chips on the four rays of the square-cycle curve, the top two at equal distance."""
    eps, delta3, delta4 = F(eps), F(delta3), F(delta4)
    return Divisor.of(
        [(-1 - eps, 1 + eps), (1 + eps, 1 + eps), (1 + delta3, -1 - delta3), (-1 - delta4, -1 - delta4)],
        square_cycle_curve(),
    )


def equal_speed_witness(eps, delta3, delta4, R) -> TropicalCurve:
    eps, delta3, delta4, R = F(eps), F(delta3), F(delta4), F(R)
    return rectangle_over_diamond(-1 - delta4, 1 + delta3, 1 + eps, -R)


def one_sided_divisor(eps, delta3, delta4) -> Divisor:
    """As above, but the upper-left chip stays on its vertex."""
    eps, delta3, delta4 = F(eps), F(delta3), F(delta4)
    return Divisor.of(
        [(F(-1), F(1)), (1 + eps, 1 + eps), (1 + delta3, -1 - delta3), (-1 - delta4, -1 - delta4)],
        square_cycle_curve(),
    )
