"""JSON encoding of curves, divisors and family points.  Rationals travel as strings."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Mapping, Union

from .curve import Edge, Ray, TropicalCurve, assemble_curve, check_balancing, curve_of, parse_polynomial
from .errors import TroplaneError
from .intersect import Divisor
from .lattice import Cell, LatticePolygon, Subdivision, fmt_point, fmt_q, q


def _vec(v) -> list[int]:
    return [int(v[0]), int(v[1])]


def subdivision_to_json(sub_: Subdivision) -> dict:
    return {
        "dim": sub_.dim,
        "points": [_vec(p) for p in sub_.points],
        "cells": [{"vertices": [_vec(v) for v in c.vertices], "points": [_vec(p) for p in c.points]} for c in sub_.cells],
    }


def subdivision_from_json(data: Mapping) -> Subdivision:
    cells = tuple(
        Cell(tuple(tuple(v) for v in c["vertices"]), tuple(tuple(p) for p in c["points"])) for c in data["cells"]
    )
    return Subdivision(tuple(tuple(p) for p in data["points"]), cells, int(data["dim"]))


def curve_to_json(curve: TropicalCurve) -> dict:
    return {
        "vertices": [fmt_point(v) for v in curve.vertices],
        "bounded_edges": [
            {"v": [e.u, e.v], "dir": _vec(e.direction), "len": fmt_q(e.length), "weight": e.weight, "dual": [_vec(p) for p in e.dual]}
            for e in curve.bounded_edges
        ],
        "rays": [
            {"v": r.vertex, "dir": _vec(r.direction), "weight": r.weight, "dual": [_vec(p) for p in r.dual]}
            for r in curve.rays
        ],
        "newton": [_vec(v) for v in curve.newton.vertices],
        "dual": subdivision_to_json(curve.dual),
    }


def curve_from_json(data: Mapping) -> TropicalCurve:
    """Decode a curve; polynomial payloads (with ``terms``) are accepted too."""
    if "terms" in data:
        return curve_of(parse_polynomial(data))
    try:
        dual = subdivision_from_json(data["dual"])
        vertices = tuple((q(x), q(y)) for x, y in data["vertices"])
        edges = tuple(
            Edge(int(e["v"][0]), int(e["v"][1]), tuple(e["dir"]), q(e["len"]), int(e.get("weight", 1)), tuple(tuple(p) for p in e["dual"]))
            for e in data["bounded_edges"]
        )
        rays = tuple(
            Ray(int(r["v"]), tuple(r["dir"]), int(r.get("weight", 1)), tuple(tuple(p) for p in r["dual"]))
            for r in data["rays"]
        )
        newton = LatticePolygon(tuple(tuple(v) for v in data["newton"]))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, TroplaneError):
            raise
        raise TroplaneError("PARSE_ERROR", f"malformed curve JSON: {exc}") from exc
    curve = TropicalCurve(vertices, edges, rays, dual, newton)
    if check_balancing(curve):
        raise TroplaneError("PARSE_ERROR", "curve is not balanced", vertices=check_balancing(curve))
    if dual.dim == 2 and vertices:
        rebuilt = assemble_curve(dual, 0, vertices[0], [e.length for e in edges])
        if rebuilt != curve:
            raise TroplaneError("PARSE_ERROR", "curve data is inconsistent with its dual subdivision")
    return curve


def divisor_to_json(D: Divisor) -> dict:
    return D.to_json()


def divisor_from_json(data: Mapping, host: TropicalCurve = None) -> Divisor:
    try:
        chips = [((q(c["pt"][0]), q(c["pt"][1])), int(c.get("mult", 1))) for c in data["chips"]]
    except (KeyError, TypeError, IndexError) as exc:
        raise TroplaneError("PARSE_ERROR", f"malformed divisor JSON: {exc}") from exc
    return Divisor(tuple(chips), host)


def load_json(path: Union[str, Path]) -> Any:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise TroplaneError("IO_ERROR", str(exc)) from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise TroplaneError("PARSE_ERROR", str(exc), position=exc.pos) from exc


def dumps(data: Any) -> str:
    return json.dumps(data, indent=2, sort_keys=False)
