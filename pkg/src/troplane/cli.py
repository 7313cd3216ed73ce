"""Command-line front end: JSON in, JSON (and optional SVG) out.

Exit status: 0 success, 2 invalid input, 3 negative verdict, 4 internal limit.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from .curve import TropicalCurve, curve_of, parse_polynomial
from .divisor import cell_of, is_internal, linearly_equivalent
from .errors import LIMIT_CODES, TroplaneError
from .intersect import Divisor, proper_intersection, self_intersection, stable_intersection
from .lattice import fmt_q, q
from .realize import FamilyPoint, certify_counterexample, family_of, local_dims, member, psi, rst_membership
from .render import write_svg
from .serialize import curve_from_json, curve_to_json, divisor_from_json, dumps, load_json
from .valuation import lemma31_witness, parse_puiseux, tropicalize_intersection

EXIT_OK, EXIT_INPUT, EXIT_NEGATIVE, EXIT_LIMIT = 0, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise TroplaneError("USAGE", message)


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise TroplaneError("IO_ERROR", str(exc)) from exc


def _load_curve(path: str) -> TropicalCurve:
    """A curve JSON, a polynomial JSON, or a polynomial written as text."""
    text = _read_text(path)
    if text.lstrip().startswith("{"):
        return curve_from_json(load_json(path))
    return curve_of(parse_polynomial(text.strip()))


def _load_divisor(path: str, host: Optional[TropicalCurve] = None) -> Divisor:
    return divisor_from_json(load_json(path), host)


def _pair(text: str, what: str) -> tuple:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 2:
        raise TroplaneError("PARSE_ERROR", f"{what} must be two comma-separated numbers")
    return tuple(q(p) for p in parts)


def _emit(data, out: Optional[str]) -> None:
    text = dumps(data) + "\n"
    if out:
        try:
            Path(out).write_text(text)
        except OSError as exc:
            raise TroplaneError("IO_ERROR", str(exc)) from exc
    else:
        sys.stdout.write(text)


def _cmd_curve(args) -> int:
    curve = _load_curve(args.input)
    _emit(curve_to_json(curve), args.output)
    if args.svg:
        write_svg(args.svg, [curve])
    return EXIT_OK


def _cmd_intersect(args) -> int:
    a, b = _load_curve(args.a), _load_curve(args.b)
    if args.perturb:
        v = _pair(args.perturb, "--perturb")
        if any(x.denominator != 1 for x in v):
            raise TroplaneError("PARSE_ERROR", "--perturb must be an integer vector")
        D = stable_intersection(a, b, tuple(int(x) for x in v))
    elif args.stable:
        D = stable_intersection(a, b)
    else:
        D = proper_intersection(a, b)
    _emit(D.to_json(), args.output)
    if args.svg:
        write_svg(args.svg, [a, b], [D])
    return EXIT_OK


def _cmd_self_intersect(args) -> int:
    curve = _load_curve(args.input)
    _emit(self_intersection(curve).to_json(), args.output)
    return EXIT_OK


def _cmd_equiv(args) -> int:
    curve = _load_curve(args.curve)
    D, E = _load_divisor(args.d, curve), _load_divisor(args.e, curve)
    same = linearly_equivalent(curve, D, E)
    _emit({"equivalent": same}, args.output)
    return EXIT_OK if same else EXIT_NEGATIVE


def _cmd_classify(args) -> int:
    curve = _load_curve(args.curve)
    D = _load_divisor(args.d, curve)
    internal = is_internal(curve, D)
    out = {"internal": internal}
    try:
        out["cell"] = cell_of(curve, D).to_json()
    except TroplaneError as exc:
        if exc.code not in ("NOT_IN_LINEAR_SYSTEM", "WRONG_GENUS"):
            raise
        out["cell"] = None
        out["cell_error"] = exc.code
    _emit(out, args.output)
    return EXIT_OK if internal else EXIT_NEGATIVE


def _cmd_realize(args) -> int:
    curve = _load_curve(args.curve)
    D = _load_divisor(args.d, curve)
    if args.certify:
        report = certify_counterexample(curve, D)
        _emit(report, args.output)
        if args.svg:
            write_svg(args.svg, [curve], [D])
        status = report.get("rst_membership", {}).get("status")
        return EXIT_NEGATIVE if status == "NOT_IN_RST" or not report["morrison_check"] else EXIT_OK
    verdict = rst_membership(curve, D, alt_subdivisions=args.alt_subdivisions)
    _emit(verdict.to_json(), args.output)
    if args.svg:
        write_svg(args.svg, [curve] + ([verdict.witness] if verdict.witness is not None else []), [D])
    return EXIT_NEGATIVE if verdict.status == "NOT_IN_RST" else EXIT_OK


def _cmd_psi(args) -> int:
    curve = _load_curve(args.curve)
    family = family_of(curve)
    lengths = [q(x) for x in args.lengths.split(",")] if args.lengths else [e.length for e in curve.bounded_edges]
    p = FamilyPoint.of(_pair(args.eta, "--eta"), lengths)
    out = {"divisor": psi(curve, family, p).to_json(), "member": curve_to_json(member(family, p))}
    if args.dims:
        out["dims"] = local_dims(curve, family, p).to_json()
    _emit(out, args.output)
    return EXIT_OK


def _cmd_valuation(args) -> int:
    if args.action == "intersect":
        f, g = parse_puiseux(load_json(args.f)), parse_puiseux(load_json(args.g))
        result = tropicalize_intersection(f, g, trials=args.trials, order=args.trunc, seed=args.seed)
        if isinstance(result, Divisor):
            _emit({"status": "PAIRED", "divisor": result.to_json()}, args.output)
            return EXIT_OK
        _emit(result.to_json(), args.output)
        return EXIT_NEGATIVE
    f1 = parse_puiseux(load_json(args.f)).instantiate({}, None)
    f2 = parse_puiseux(load_json(args.g)).instantiate({}, None)
    report = lemma31_witness(f1, f2, args.r)
    out = report.to_json()
    out["h"] = {
        "terms": [
            {"exp": list(e), "coeff": [{"e": fmt_q(te), "c": fmt_q(c)} for te, c in s.terms]} for e, s in report.h.terms
        ]
    }
    _emit(out, args.output)
    return EXIT_OK if report.equal else EXIT_NEGATIVE


def _cmd_render(args) -> int:
    curves = [_load_curve(c) for c in args.curve or []]
    divisors = [_load_divisor(d) for d in args.d or []]
    write_svg(args.output, curves, divisors)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="troplane", description="Tropical plane curves, stable intersections and divisors.")
    subs = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = subs.add_parser("curve", help="tropical curve of a polynomial")
    p.add_argument("-i", "--input", required=True)
    p.add_argument("-o", "--output")
    p.add_argument("--svg")
    p.set_defaults(run=_cmd_curve)

    p = subs.add_parser("intersect", help="intersection divisor of two curves")
    p.add_argument("-a", required=True)
    p.add_argument("-b", required=True)
    p.add_argument("--stable", action="store_true")
    p.add_argument("--perturb", help='perturbation direction "a,b" (implies --stable)')
    p.add_argument("-o", "--output")
    p.add_argument("--svg")
    p.set_defaults(run=_cmd_intersect)

    p = subs.add_parser("self-intersect", help="stable self-intersection")
    p.add_argument("-i", "--input", required=True)
    p.add_argument("-o", "--output")
    p.set_defaults(run=_cmd_self_intersect)

    p = subs.add_parser("equiv", help="linear equivalence of two divisors")
    p.add_argument("-c", "--curve", required=True)
    p.add_argument("-d", required=True)
    p.add_argument("-e", required=True)
    p.add_argument("-o", "--output")
    p.set_defaults(run=_cmd_equiv)

    p = subs.add_parser("classify", help="internal test and cell of a divisor")
    p.add_argument("-c", "--curve", required=True)
    p.add_argument("-d", required=True)
    p.add_argument("-o", "--output")
    p.set_defaults(run=_cmd_classify)

    p = subs.add_parser("realize", help="is a divisor a stable intersection")
    p.add_argument("-c", "--curve", required=True)
    p.add_argument("-d", required=True)
    p.add_argument("--alt-subdivisions", action="store_true")
    p.add_argument("--certify", action="store_true")
    p.add_argument("-o", "--output")
    p.add_argument("--svg")
    p.set_defaults(run=_cmd_realize)

    p = subs.add_parser("psi", help="divisor cut out by a translated family member")
    p.add_argument("-c", "--curve", required=True)
    p.add_argument("--eta", required=True)
    p.add_argument("--lengths")
    p.add_argument("--dims", action="store_true")
    p.add_argument("-o", "--output")
    p.set_defaults(run=_cmd_psi)

    p = subs.add_parser("valuation", help="valuations over Puiseux series")
    p.add_argument("action", choices=["intersect", "shift"])
    p.add_argument("-f", required=True)
    p.add_argument("-g", required=True)
    p.add_argument("--trials", type=int, default=3)
    p.add_argument("--trunc", type=int, default=8)
    p.add_argument("--seed", type=int)
    p.add_argument("-r", type=int, default=2, help="shift exponent for the shift action")
    p.add_argument("-o", "--output")
    p.set_defaults(run=_cmd_valuation)

    p = subs.add_parser("render", help="SVG of curves and divisors")
    p.add_argument("-c", "--curve", action="append")
    p.add_argument("-d", action="append")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(run=_cmd_render)
    return parser


def dispatch(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.run(args)
    except TroplaneError as exc:
        sys.stderr.write(json.dumps(exc.to_json()) + "\n")
        return EXIT_LIMIT if exc.code in LIMIT_CODES else EXIT_INPUT
    except SystemExit as exc:  # --help
        return int(exc.code or 0)


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
