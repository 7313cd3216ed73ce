import itertools
from fractions import Fraction

from hypothesis import given, strategies as st

from troplane.lp import LinearSystem, nullspace, rank, rref, solve_affine, strictly_feasible, verify_certificate

F = Fraction


def fourier_motzkin_feasible(rows):
    """Independent decision for systems of rows (a, b, strict) meaning a.x >= b or a.x > b."""
    rows = [([F(v) for v in a], F(b), s) for a, b, s in rows]
    n = len(rows[0][0]) if rows else 0
    for k in range(n):
        pos = [r for r in rows if r[0][k] > 0]
        neg = [r for r in rows if r[0][k] < 0]
        rest = [r for r in rows if r[0][k] == 0]
        for (a1, b1, s1), (a2, b2, s2) in itertools.product(pos, neg):
            l1, l2 = -a2[k], a1[k]
            a = [l1 * x + l2 * y for x, y in zip(a1, a2)]
            rest.append((a, l1 * b1 + l2 * b2, s1 or s2))
        rows = rest
    return all((0 > b) if s else (0 >= b) for _, b, s in rows)


def test_rref_rank_nullspace():
    M = [[1, 2, 3], [2, 4, 6], [1, 0, 1]]
    assert rank(M) == 2
    N = nullspace(M, 3)
    assert len(N) == 1
    for row in M:
        assert sum(F(a) * b for a, b in zip(row, N[0])) == 0
    R, piv = rref(M)
    assert piv == [0, 1]


def test_solve_affine():
    x0, N = solve_affine([([1, 1], F(2))], 2)
    assert x0[0] + x0[1] == 2 and len(N) == 1
    assert solve_affine([([1, 1], F(2)), ([1, 1], F(3))], 2) is None


def test_strict_inequalities_are_strict():
    # x > 0, -x > 0 is infeasible though the closure x = 0 is feasible
    system = LinearSystem(1, gts=[([1], F(0)), ([-1], F(0))])
    res = strictly_feasible(system)
    assert not res.feasible
    assert verify_certificate(system, res.certificate)
    relaxed = LinearSystem(1, geqs=[([1], F(0)), ([-1], F(0))])
    assert strictly_feasible(relaxed).feasible


def test_equalities_with_strict_rows():
    system = LinearSystem(2, eqs=[([1, -1], F(0))], gts=[([1, 0], F(1)), ([0, -1], F(-3))])
    res = strictly_feasible(system)
    assert res.feasible and system.satisfied_by(res.point)


coeff = st.integers(-3, 3)
row = st.tuples(st.lists(coeff, min_size=2, max_size=2), st.integers(-4, 4), st.booleans())


@given(st.lists(row, min_size=1, max_size=6))
def test_feasibility_agrees_with_fourier_motzkin(rows):
    system = LinearSystem(2)
    for a, b, strict in rows:
        (system.gts if strict else system.geqs).append((a, F(b)))
    res = strictly_feasible(system)
    assert res.feasible == fourier_motzkin_feasible(rows)
    if res.feasible:
        assert system.satisfied_by(res.point)
    else:
        assert verify_certificate(system, res.certificate)
