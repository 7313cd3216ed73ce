"""Deterministic SVG drawings of curves and divisors."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .curve import TropicalCurve
from .errors import TroplaneError
from .intersect import Divisor

PALETTE = ("#1f4e9a", "#b03a2e", "#1e8449", "#7d3c98", "#b9770e")
CANVAS = 480


@dataclass(frozen=True)
class RenderSpec:
    """Optional fixed viewport ``(xmin, ymin, xmax, ymax)`` and drawing toggles."""

    viewport: Optional[tuple[Fraction, Fraction, Fraction, Fraction]] = None
    ray_length: Optional[Fraction] = None
    label_multiplicities: bool = True

    def __post_init__(self):
        if self.viewport is not None:
            x0, y0, x1, y1 = (Fraction(v) for v in self.viewport)
            if not (x0 < x1 and y0 < y1):
                raise TroplaneError("EMPTY_SCENE", "viewport has no area")
            object.__setattr__(self, "viewport", (x0, y0, x1, y1))


def _f(x) -> str:
    return f"{float(x):.6f}"


def render_svg(
    curves: Sequence[TropicalCurve] = (),
    divisors: Sequence[Divisor] = (),
    spec: RenderSpec = RenderSpec(),
) -> str:
    """Curves are drawn in palette order; rays are cut at a common length."""
    if not curves:
        raise TroplaneError("EMPTY_SCENE", "at least one curve is required")
    points = [v for c in curves for v in c.vertices] + [p for D in divisors for p in D.support]
    if not points:
        raise TroplaneError("EMPTY_SCENE", "nothing to draw")
    xs = [Fraction(p[0]) for p in points]
    ys = [Fraction(p[1]) for p in points]
    span = max(max(xs) - min(xs), max(ys) - min(ys), Fraction(1))
    reach = spec.ray_length if spec.ray_length is not None else span / 2
    if spec.viewport is not None:
        lo_x, lo_y, hi_x, hi_y = spec.viewport
    else:
        lo_x, hi_x = min(xs) - reach, max(xs) + reach
        lo_y, hi_y = min(ys) - reach, max(ys) + reach
    side = max(hi_x - lo_x, hi_y - lo_y)
    unit = Fraction(CANVAS) / side

    def to_screen(p) -> tuple[str, str]:
        return _f((Fraction(p[0]) - lo_x) * unit), _f((hi_y - Fraction(p[1])) * unit)

    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{CANVAS}" height="{CANVAS}" '
        f'viewBox="0 0 {CANVAS} {CANVAS}">',
        f'<rect x="0" y="0" width="{CANVAS}" height="{CANVAS}" fill="white"/>',
    ]
    for k, curve in enumerate(curves):
        colour = PALETTE[k % len(PALETTE)]
        lines.append(f'<g class="curve" stroke="{colour}" fill="none">')
        for e in curve.bounded_edges:
            (x1, y1), (x2, y2) = to_screen(curve.vertices[e.u]), to_screen(curve.vertices[e.v])
            lines.append(f'<line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" stroke-width="{1 + e.weight}"/>')
        for r in curve.rays:
            start = curve.vertices[r.vertex]
            norm = max(abs(r.direction[0]), abs(r.direction[1]))
            end = (start[0] + reach * r.direction[0] / norm, start[1] + reach * r.direction[1] / norm)
            (x1, y1), (x2, y2) = to_screen(start), to_screen(end)
            lines.append(
                f'<line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" stroke-width="{1 + r.weight}" stroke-dasharray="6 3"/>'
            )
        lines.append("</g>")
    for D in divisors:
        lines.append('<g class="divisor">')
        for p, m in D.chips:
            x, y = to_screen(p)
            fill = "black" if m > 0 else "white"
            lines.append(f'<circle cx="{x}" cy="{y}" r="{_f(3 + 2 * abs(m))}" fill="{fill}" stroke="black"/>')
            if spec.label_multiplicities and abs(m) > 1:
                lines.append(f'<text x="{x}" y="{y}" dx="8" dy="-8" font-size="12">{m}</text>')
        lines.append("</g>")
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def write_svg(
    path: str, curves: Iterable[TropicalCurve] = (), divisors: Iterable[Divisor] = (), spec: RenderSpec = RenderSpec()
) -> None:
    text = render_svg(list(curves), list(divisors), spec)
    try:
        with open(path, "w") as fh:
            fh.write(text)
    except OSError as exc:
        raise TroplaneError("IO_ERROR", str(exc)) from exc
