"""Acceptance criteria, one test per criterion.

Each test prints a single ``PASS``/``FAIL`` line with its runtime and the time
budget; the lines are repeated in the pytest terminal summary.  Run directly
with ``python3 tests/test_acceptance.py`` to see only those lines.
"""

import functools
import itertools
import random
import sys
import time
from fractions import Fraction

from troplane.curve import curve_of, genus, parse_polynomial, translate
from troplane.divisor import cell_of, equivalent_bruteforce, is_internal, linearly_equivalent
from troplane.errors import TroplaneError
from troplane.fixtures import (
    anti_diagonal_curve,
    equal_speed_divisor,
    equal_speed_parameters,
    one_sided_divisor,
    rectangle_over_diamond,
    square_cycle_curve,
    unit_square_curve,
    unit_square_witness,
)
from troplane.intersect import Divisor, self_intersection, stable_intersection
from troplane.lattice import LatticePolygon, mixed_volume
from troplane.realize import (
    FamilyPoint,
    certify_counterexample,
    family_of,
    fiber_samples,
    local_dims,
    member,
    omega_region,
    pinned_vertices,
    region_of,
    rst_membership,
)
from troplane.valuation import PuiseuxPolynomial, TruncatedPuiseux, lemma31_witness, parse_puiseux, tropicalize_intersection

from strategies import random_polygon, random_smooth_polynomial
from test_valuation import EXAMPLE_F, EXAMPLE_G

F = Fraction
RESULTS: list[str] = []


def criterion(number: int, title: str, budget: float):
    def wrap(fn):
        @functools.wraps(fn)
        def run():
            start = time.perf_counter()
            try:
                fn()
            except BaseException as exc:
                elapsed = time.perf_counter() - start
                line = f"FAIL criterion {number:2d} {title} ({elapsed:.2f}s, budget {budget}s): {type(exc).__name__}: {exc}"
                RESULTS.append(line)
                print(line)
                raise
            elapsed = time.perf_counter() - start
            ok = elapsed < budget
            line = f"{'PASS' if ok else 'FAIL'} criterion {number:2d} {title} ({elapsed:.2f}s, budget {budget}s)"
            RESULTS.append(line)
            print(line)
            assert ok, line

        return run

    return wrap


@criterion(1, "curve of t+x+y+txy, best of 5 under 1 ms", 1.0)
def test_criterion_01_unit_square_curve():
    best = float("inf")
    for _ in range(5):
        start = time.perf_counter()
        curve = curve_of(parse_polynomial("t + x + y + t*x*y"))
        best = min(best, time.perf_counter() - start)
    assert sorted(curve.vertices) == [(-1, -1), (1, 1)]
    assert len(curve.bounded_edges) == 1 and curve.bounded_edges[0].length == 2
    assert sorted(r.direction for r in curve.rays) == [(-1, 0), (0, -1), (0, 1), (1, 0)]
    # the construction itself has a 1 ms budget; best of five runs filters scheduler noise
    assert best < 0.001, f"construction took {best * 1000:.3f} ms"


@criterion(2, "stable intersections of the unit-square curve", 1.0)
def test_criterion_02_unit_square_intersections():
    f = unit_square_curve()
    fig_a = unit_square_witness((F(-7, 10), F(-7, 10)), F(11, 10))
    fig_b = unit_square_witness((F(-7, 10), F(-13, 10)), F(23, 10))
    fig_c = anti_diagonal_curve((F(-7, 10), F(7, 10)), F(7, 5))
    assert stable_intersection(f, fig_a) == Divisor.of([(F(-7, 10), F(-7, 10)), (F(2, 5), F(2, 5))])
    assert stable_intersection(f, fig_b) == Divisor.of([(F(-1), F(-13, 10)), (F(8, 5), F(1))])
    double = Divisor.of({(F(0), F(0)): 2}, f)
    assert stable_intersection(f, fig_c) == double
    verdict = rst_membership(f, double, alt_subdivisions=True)
    assert verdict.status == "REALIZABLE_WITNESS"
    assert stable_intersection(f, verdict.witness) == double
    assert {frozenset(c.vertices) for c in verdict.witness.dual.cells} == {frozenset(c.vertices) for c in fig_c.dual.cells}


@criterion(3, "vertical pair is a tropicalization but not a stable intersection", 5.0)
def test_criterion_03_algebraic_witness():
    f = unit_square_curve()
    D = Divisor.of([(1, 2), (1, 3)], f)
    verdict = rst_membership(f, D, alt_subdivisions=True)
    assert verdict.status == "NOT_IN_RST"
    assert verdict.certificate["reason"] == "EXHAUSTED"
    for stratum in verdict.certificate["strata"]:
        assert stratum["covered"] == stratum["matchings"] > 0
        assert all(entry["certificate"] for entry in stratum["pruned"])
    fp, gp = parse_puiseux(EXAMPLE_F), parse_puiseux(EXAMPLE_G)
    for seed in (0, 1, 2):
        assert tropicalize_intersection(fp, gp, trials=1, order=8, seed=seed) == D
    assert tropicalize_intersection(fp, gp, trials=3, order=8) == D


def _nested_pair(rng):
    outer = LatticePolygon.hull_of([(0, 0), (2, 0), (0, 2)]).lattice_points()

    def series():
        return TruncatedPuiseux(((F(rng.randint(0, 4)), F(rng.randint(1, 9))),))

    f1 = PuiseuxPolynomial.of({e: series() for e in outer})
    f2 = PuiseuxPolynomial.of({e: series() for e in rng.sample(outer, rng.randint(2, len(outer)))})
    return f1, f2


@criterion(4, "sharp threshold for f1 + t^r f2", 2.0)
def test_criterion_04_shift_threshold():
    rng = random.Random(31)
    for _ in range(10):
        f1, f2 = _nested_pair(rng)
        first = lemma31_witness(f1, f2, 0)
        for r in range(0, first.sufficient_r + 3):
            report = lemma31_witness(f1, f2, r)
            assert report.minimal_r == first.minimal_r
            assert report.equal == (r >= first.minimal_r), (r, report)


@criterion(5, "local dimension counts on the square cycle", 2.0)
def test_criterion_05_dimension_counts():
    curve = square_cycle_curve()
    fam = family_of(curve)
    expected_image = len(curve.bounded_edges) - 2 * genus(curve) - 1
    d_minus_g = int(mixed_volume(curve.newton, curve.newton)) - genus(curve)
    dims = local_dims(curve, fam, FamilyPoint.of((F(1, 4), F(1, 2)), curve.edge_lengths()))
    assert (dims.kernel, dims.image) == (1, 1)
    assert dims.image == expected_image == 1
    assert dims.joint == d_minus_g == 3
    rng = random.Random(5)
    done = 0
    while done < 20:
        b = F(rng.randint(1, 15), 32)
        a = F(rng.randint(-15, 15), 32)
        if abs(a) >= b:
            continue
        try:
            assert omega_region(curve, (a, b)).exponent == (1, 2)
            dims = local_dims(curve, fam, FamilyPoint.of((a, b), curve.edge_lengths()))
        except TroplaneError as exc:
            assert exc.code in ("TIE", "ON_CONE_BOUNDARY")
            continue
        assert (dims.kernel, dims.image, dims.joint) == (1, expected_image, d_minus_g)
        done += 1


def _genus_one_small(rng):
    while True:
        P = LatticePolygon.hull_of([(rng.randint(0, 3), rng.randint(0, 3)) for _ in range(rng.randint(3, 5))])
        if P.dim == 2 and len(P.interior_lattice_points()) == 1 and 2 * P.area <= 6:
            found = random_smooth_polynomial(rng, P)
            if found is not None:
                return found[1]


def _check_pinning(curve, rng, count=20):
    fam = family_of(curve)
    done = 0
    while done < count:
        eta = (F(rng.randint(-9, 9), 32), F(rng.randint(-9, 9), 32))
        try:
            omega = omega_region(curve, eta)
            moved = translate(curve, eta)
            pins = pinned_vertices(curve, moved, eta)
            p = FamilyPoint.of(eta, curve.edge_lengths())
            samples = fiber_samples(curve, fam, p)
        except TroplaneError as exc:
            # non-generic translation: resample
            assert exc.code in ("TIE", "ON_CONE_BOUNDARY", "NOT_PROPER", "NOT_LINEAR_HERE")
            continue
        outside = [i for i, v in enumerate(moved.vertices) if region_of(curve, v) != omega.exponent]
        assert set(outside) <= set(pins), (eta, outside, pins)
        base = member(fam, p)
        for s in samples:
            assert psi_equal(curve, fam, s, p)
            assert all(member(fam, s).vertices[i] == base.vertices[i] for i in pins)
        done += 1


def psi_equal(curve, fam, a, b):
    from troplane.realize import psi

    return psi(curve, fam, a) == psi(curve, fam, b)


@criterion(6, "vertices outside the translated region are pinned", 10.0)
def test_criterion_06_pinning():
    rng = random.Random(7)
    genus_one = _genus_one_small(rng)
    assert genus(genus_one) == 1 and len(genus_one.vertices) <= 6
    for curve in (square_cycle_curve(), unit_square_curve(), genus_one):
        _check_pinning(curve, rng)


@criterion(7, "stable intersection degree equals mixed volume", 20.0)
def test_criterion_07_bernstein():
    rng = random.Random(77)
    pairs = 0
    while pairs < 100:
        a = random_smooth_polynomial(rng, random_polygon(rng, max_points=8))
        b = random_smooth_polynomial(rng, random_polygon(rng, max_points=8))
        if a is None or b is None:
            continue
        assert stable_intersection(a[1], b[1]).degree == mixed_volume(a[1].newton, b[1].newton)
        pairs += 1
    curves = 0
    while curves < 50:
        found = random_smooth_polynomial(rng, random_polygon(rng, max_points=8))
        if found is None:
            continue
        curve = found[1]
        assert self_intersection(curve).degree == len(curve.vertices)
        curves += 1


def _half_grid(curve, ray_reach=F(1, 2)):
    pts = set(curve.vertices)
    for piece in curve.pieces():
        top = piece.length if piece.length is not None else ray_reach + F(1, 2)
        t = F(1, 2)
        while t < top:
            pts.add((piece.start[0] + t * piece.direction[0], piece.start[1] + t * piece.direction[1]))
            t += F(1, 2)
    return sorted(pts)


@criterion(8, "equivalence agrees with chip firing on the half grid", 30.0)
def test_criterion_08_equivalence_oracle():
    curve = square_cycle_curve()
    grid = _half_grid(curve)
    reference = self_intersection(curve)
    refs = {k: Divisor(tuple((p, 1) for p in reference.support[:k]), curve) for k in range(1, 5)}
    instances = equivalent = 0
    for k in range(1, 5):
        for combo in itertools.combinations_with_replacement(grid, k):
            D = Divisor.of(combo, curve)
            fast = linearly_equivalent(curve, D, refs[k])
            assert fast == equivalent_bruteforce(curve, D, refs[k], 2), combo
            instances += 1
            equivalent += fast
    assert instances > 5000 and 0 < equivalent < instances


@criterion(9, "internal classification of divisors on the square cycle", 1.0)
def test_criterion_09_internal_classification():
    rect = rectangle_over_diamond(F(-3, 2), F(3, 2), 1, -1)

    def div(points):
        return Divisor.of([(F(str(x)), F(str(y))) for x, y in points], rect)

    assert is_internal(rect, div([(-1.2, 1), (1.2, 1), (-0.7, -1), (0.7, -1)]))
    assert is_internal(rect, div([(-1.7, -1.2), (0.5, 1), (1.7, 1.2), (2.1, 1.6)]))
    assert not is_internal(rect, div([(1.5, 1), (1.8, -1.3), (-1.7, -1.2), (-2, 1.5)]))
    cell = cell_of(rect, div([(-2, 1.5), (1.7, 1.2), (-1.5, -1), (1.5, -1)]))
    assert cell.exposed and cell.dimension == 2
    sq = square_cycle_curve()
    rays = cell_of(sq, Divisor.of([(-2, -2), (2, 2), (-2, 2), (2, -2)], sq))
    d = int(mixed_volume(sq.newton, sq.newton))
    assert rays.dimension == d == 4


@criterion(10, "counterexample certificate and equal-speed witness", 10.0)
def test_criterion_10_counterexample():
    curve = square_cycle_curve()
    prm = equal_speed_parameters()
    report = certify_counterexample(curve, one_sided_divisor(prm["eps"], prm["delta3"], prm["delta4"]))
    assert report["morrison_check"] is True
    assert report["is_internal"] is False
    rst = report["rst_membership"]
    assert rst["status"] == "NOT_IN_RST"
    assert rst["certificate"]["templates"] == 1  # the diamond has one unimodular triangulation
    assert all(s["covered"] == s["matchings"] for s in rst["certificate"]["strata"])
    assert set(report["balancing_defect"]["case1"]) == {"0"}
    D = equal_speed_divisor(prm["eps"], prm["delta3"], prm["delta4"])
    verdict = rst_membership(curve, D, alt_subdivisions=True)
    assert verdict.status == "REALIZABLE_WITNESS"
    assert stable_intersection(curve, verdict.witness) == D


if __name__ == "__main__":
    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except BaseException:
                failed += 1
    sys.exit(1 if failed else 0)
