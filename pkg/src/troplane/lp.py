"""Exact rational linear algebra and LP feasibility with strict inequalities.

The simplex is a dense two-phase tableau over ``Fraction`` using Bland's rule,
so runs are deterministic and never cycle.  Infeasible systems come back with
a Motzkin-type certificate that can be re-checked independently by
:func:`verify_certificate`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

Row = list  # list[Fraction]

ZERO = Fraction(0)
ONE = Fraction(1)


# ---------------------------------------------------------------------------
# linear algebra

def rref(matrix: Sequence[Sequence]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form and pivot columns."""
    m = [[Fraction(x) for x in row] for row in matrix]
    pivots: list[int] = []
    if not m:
        return m, pivots
    rows, cols = len(m), len(m[0])
    r = 0
    for c in range(cols):
        pr = next((i for i in range(r, rows) if m[i][c] != 0), None)
        if pr is None:
            continue
        m[r], m[pr] = m[pr], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(rows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return m, pivots


def rank(matrix: Sequence[Sequence]) -> int:
    if not matrix or not matrix[0]:
        return 0
    return len(rref(matrix)[1])


def nullspace(matrix: Sequence[Sequence], ncols: Optional[int] = None) -> list[list[Fraction]]:
    """Basis of ``{x : M x = 0}`` (one vector per free column)."""
    if not matrix:
        n = ncols or 0
        return [[ONE if i == j else ZERO for i in range(n)] for j in range(n)]
    red, piv = rref(matrix)
    n = len(matrix[0])
    free = [c for c in range(n) if c not in piv]
    basis = []
    for f in free:
        v = [ZERO] * n
        v[f] = ONE
        for row, pc in zip(red, piv):
            v[pc] = -row[f]
        basis.append(v)
    return basis


def solve_affine(eqs: Sequence[tuple[Sequence, Fraction]], n: int):
    """Parametrize ``{x : a.x = b}`` as ``x0 + N z``; ``None`` if inconsistent."""
    if not eqs:
        return [ZERO] * n, nullspace([], n)
    aug = [list(a) + [b] for a, b in eqs]
    red, piv = rref(aug)
    if n in piv:
        return None
    x0 = [ZERO] * n
    for row, pc in zip(red, piv):
        x0[pc] = row[n]
    return x0, nullspace([row[:n] for row in red] or [[ZERO] * n], n)


# ---------------------------------------------------------------------------
# simplex

class _Tableau:
    """max c.x  s.t.  A x = b (b >= 0), x >= 0, via two phases."""

    def __init__(self, A, b, c):
        self.m = len(A)
        self.n = len(c)
        self.A = [[Fraction(v) for v in row] for row in A]
        self.b = [Fraction(v) for v in b]
        self.c = [Fraction(v) for v in c]

    def _pivot(self, T, basis, r, col):
        inv = 1 / T[r][col]
        T[r] = [v * inv for v in T[r]]
        for i in range(len(T)):
            if i != r and T[i][col] != 0:
                f = T[i][col]
                T[i] = [a - f * p for a, p in zip(T[i], T[r])]
        basis[r] = col

    def _run(self, T, basis, ncols):
        # objective row is T[-1]: reduced costs (maximize: enter while some < 0)
        while True:
            col = next((j for j in range(ncols) if T[-1][j] < 0), None)
            if col is None:
                return "optimal"
            best = None
            for i in range(len(T) - 1):
                if T[i][col] > 0:
                    ratio = T[i][-1] / T[i][col]
                    if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                        best = (ratio, i)
            if best is None:
                return "unbounded"
            self._pivot(T, basis, best[1], col)

    def solve(self):
        m, n = self.m, self.n
        # phase 1: one artificial per row
        T = []
        for i in range(m):
            T.append(self.A[i] + [ONE if k == i else ZERO for k in range(m)] + [self.b[i]])
        obj = [ZERO] * (n + m + 1)
        for i in range(m):
            for j in range(n):
                obj[j] -= self.A[i][j]
            obj[-1] -= self.b[i]
        T.append(obj)
        basis = [n + i for i in range(m)]
        self._run(T, basis, n + m)
        if T[-1][-1] != 0:
            return "infeasible", None, None
        # drive artificials out of the basis, dropping redundant rows
        r = 0
        while r < len(T) - 1:
            if basis[r] >= n:
                col = next((j for j in range(n) if T[r][j] != 0), None)
                if col is None:
                    del T[r]
                    del basis[r]
                    continue
                self._pivot(T, basis, r, col)
            r += 1
        T = [row[:n] + [row[-1]] for row in T[:-1]]
        obj = [-cj for cj in self.c] + [ZERO]
        for i, bi in enumerate(basis):
            if obj[bi] != 0:
                f = obj[bi]
                obj = [a - f * p for a, p in zip(obj, T[i])]
        T.append(obj)
        status = self._run(T, basis, n)
        x = [ZERO] * n
        for i, bi in enumerate(basis):
            x[bi] = T[i][-1]
        if status == "unbounded":
            return "unbounded", x, None
        return "optimal", x, T[-1][-1]


def _standard_form(nvars, eqs, geqs, free, objective=None):
    """Build ``A x = b, x >= 0`` from mixed rows; free variables are split."""
    cols = []  # (original var, sign)
    for j in range(nvars):
        cols.append((j, 1))
        if free[j]:
            cols.append((j, -1))
    nslack = len(geqs)
    A, b = [], []

    def expand(a):
        return [Fraction(a[j]) * s for j, s in cols]

    for a, rhs in eqs:
        A.append(expand(a) + [ZERO] * nslack)
        b.append(Fraction(rhs))
    for k, (a, rhs) in enumerate(geqs):
        A.append(expand(a) + [(-ONE if i == k else ZERO) for i in range(nslack)])
        b.append(Fraction(rhs))
    for i in range(len(A)):
        if b[i] < 0:
            A[i] = [-v for v in A[i]]
            b[i] = -b[i]
    c = [ZERO] * (len(cols) + nslack)
    if objective is not None:
        for k, (j, s) in enumerate(cols):
            c[k] = Fraction(objective[j]) * s
    return A, b, c, cols


def optimize(nvars, eqs, geqs, objective, free=None):
    """Maximize ``objective.x`` over ``eqs`` (a.x = b) and ``geqs`` (a.x >= b).

    ``free[j]`` marks sign-unrestricted variables; the rest are ``>= 0``.
    Returns ``(status, x, value)``.
    """
    free = free if free is not None else [True] * nvars
    A, b, c, cols = _standard_form(nvars, eqs, geqs, free, objective)
    if not A:
        A, b = [[ZERO] * len(c)], [ZERO]
    status, xs, val = _Tableau(A, b, c).solve()
    if status == "infeasible":
        return status, None, None
    x = [ZERO] * nvars
    for k, (j, s) in enumerate(cols):
        x[j] += s * xs[k]
    return status, x, val


# ---------------------------------------------------------------------------
# strict feasibility

@dataclass
class LinearSystem:
    """``eqs``: a.x = b; ``geqs``: a.x >= b; ``gts``: a.x > b.  All variables free."""

    nvars: int
    eqs: list = field(default_factory=list)
    geqs: list = field(default_factory=list)
    gts: list = field(default_factory=list)
    labels: dict = field(default_factory=dict)

    def copy(self) -> "LinearSystem":
        return LinearSystem(self.nvars, list(self.eqs), list(self.geqs), list(self.gts), dict(self.labels))

    def satisfied_by(self, x) -> bool:
        def ev(a):
            return sum(Fraction(ai) * xi for ai, xi in zip(a, x))

        return (
            all(ev(a) == b for a, b in self.eqs)
            and all(ev(a) >= b for a, b in self.geqs)
            and all(ev(a) > b for a, b in self.gts)
        )


@dataclass
class Certificate:
    """Multipliers proving infeasibility.

    ``eq`` are free, ``geq`` and ``gt`` nonnegative; the weighted row sum is
    zero while the weighted right-hand side is positive, or zero with some
    strict row carrying positive weight.
    """

    eq: list
    geq: list
    gt: list

    def to_json(self) -> dict:
        from .lattice import fmt_q

        return {
            "eq": [fmt_q(v) for v in self.eq],
            "geq": [fmt_q(v) for v in self.geq],
            "gt": [fmt_q(v) for v in self.gt],
        }


@dataclass
class Feasibility:
    feasible: bool
    point: Optional[list] = None
    certificate: Optional[Certificate] = None


def _reduce_equalities(system: LinearSystem):
    sol = solve_affine(system.eqs, system.nvars)
    if sol is None:
        return None
    x0, N = sol

    def project(a, rhs):
        a = [Fraction(v) for v in a]
        coeffs = [sum(ai * nk[i] for i, ai in enumerate(a)) for nk in N]
        return coeffs, Fraction(rhs) - sum(ai * xi for ai, xi in zip(a, x0))

    return x0, N, [project(a, b) for a, b in system.geqs], [project(a, b) for a, b in system.gts]


def strictly_feasible(system: LinearSystem, with_certificate: bool = True) -> Feasibility:
    """Decide whether the mixed system has a solution, exactly.

    Strict rows are handled by maximizing one shared slack ``t`` (capped at 1)
    over the closed relaxation; the system is feasible iff the optimum is
    positive.  Equalities are eliminated first to keep the tableau small.
    """
    reduced = _reduce_equalities(system)
    if reduced is not None:
        x0, N, geqs, gts = reduced
        k = len(N)
        rows = [(a + [ZERO], b) for a, b in geqs]
        rows += [(a + [-ONE], b) for a, b in gts]
        rows.append(([ZERO] * k + [-ONE], -ONE))
        objective = [ZERO] * k + [ONE]
        if gts:
            status, z, val = optimize(k + 1, [], rows, objective)
        else:
            status, z, val = optimize(k + 1, [([ZERO] * k + [ONE], ZERO)], rows, [ZERO] * (k + 1))
            val = ONE if status != "infeasible" else None
        if status != "infeasible" and val is not None and val > 0:
            x = list(x0)
            for coef, vec in zip(z[:k], N):
                x = [xi + coef * vi for xi, vi in zip(x, vec)]
            assert system.satisfied_by(x)
            return Feasibility(True, point=x)
    cert = infeasibility_certificate(system) if with_certificate else None
    return Feasibility(False, certificate=cert)


def infeasibility_certificate(system: LinearSystem) -> Certificate:
    """Find multipliers certifying that ``system`` has no solution.

    Solved as its own closed LP, so it is independent of how infeasibility was
    first detected.
    """
    ne, ng, ns = len(system.eqs), len(system.geqs), len(system.gts)
    nv = ne + ng + ns
    free = [True] * ne + [False] * (ng + ns)
    rows = [a for a, _ in system.eqs] + [a for a, _ in system.geqs] + [a for a, _ in system.gts]
    rhs = [b for _, b in system.eqs] + [b for _, b in system.geqs] + [b for _, b in system.gts]
    eqs = []
    for j in range(system.nvars):
        eqs.append(([Fraction(r[j]) for r in rows], ZERO))
    value = [Fraction(v) for v in rhs]
    geqs = [(value, ZERO)]
    norm = [value[i] + (ONE if i >= ne + ng else ZERO) for i in range(nv)]
    geqs.append((norm, ONE))
    status, y, _ = optimize(nv, eqs, geqs, [ZERO] * nv, free=free)
    if status == "infeasible":
        raise RuntimeError("no certificate exists; the system is feasible")
    cert = Certificate(y[:ne], y[ne : ne + ng], y[ne + ng :])
    assert verify_certificate(system, cert)
    return cert


def verify_certificate(system: LinearSystem, cert: Certificate) -> bool:
    if len(cert.eq) != len(system.eqs) or len(cert.geq) != len(system.geqs) or len(cert.gt) != len(system.gts):
        return False
    if any(v < 0 for v in cert.geq) or any(v < 0 for v in cert.gt):
        return False
    combo = [ZERO] * system.nvars
    value = ZERO
    for mult, rows in ((cert.eq, system.eqs), (cert.geq, system.geqs), (cert.gt, system.gts)):
        for lam, (a, b) in zip(mult, rows):
            if lam:
                for j in range(system.nvars):
                    combo[j] += lam * Fraction(a[j])
                value += lam * Fraction(b)
    if any(v != 0 for v in combo):
        return False
    return value > 0 or (value == 0 and sum(cert.gt) > 0)
