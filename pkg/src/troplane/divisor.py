"""Divisors on tropical curves of genus at most one.

Linear equivalence on a genus-one curve is decided through the Abel-Jacobi
position on its cycle.  ``equivalent_bruteforce`` decides the same question on
a finite graph model with Dhar's burning algorithm and serves as an
independent check.
"""

from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional, Sequence

from . import lattice as L
from .curve import Cycle, Location, TropicalCurve, attachment_vertices, cycle_of, genus, locate
from .errors import TroplaneError
from .intersect import Divisor, self_intersection
from .lattice import q

PieceKey = tuple[str, int]


# ---------------------------------------------------------------------------
# piecewise linear functions

@dataclass(frozen=True)
class PLFunction:
    """Piecewise linear function on a curve.

    ``pieces[key] = (breakpoints, slopes)`` describes the restriction to one
    edge or ray, parametrized by lattice length from its start vertex (``u``
    for bounded edges).  ``slopes`` has one more entry than ``breakpoints``.
    Pieces that are not listed have slope 0.  ``anchor_value`` is the value at
    vertex 0.
    """

    pieces: Mapping[PieceKey, tuple[tuple[Fraction, ...], tuple[Fraction, ...]]]
    anchor_value: Fraction = Fraction(0)

    @classmethod
    def from_json(cls, data: Mapping) -> "PLFunction":
        pieces = {}
        for item in data.get("pieces", []):
            key = (str(item["kind"]), int(item["index"]))
            pieces[key] = (
                tuple(q(str(b)) for b in item.get("breakpoints", [])),
                tuple(q(str(s)) for s in item["slopes"]),
            )
        return cls(pieces, q(str(data.get("anchor_value", 0))))


def _checked_pieces(curve: TropicalCurve, phi: PLFunction):
    out = {}
    for key, (bps, slopes) in phi.pieces.items():
        kind, idx = key
        if kind == "e" and 0 <= idx < len(curve.bounded_edges):
            length = curve.bounded_edges[idx].length
        elif kind == "r" and 0 <= idx < len(curve.rays):
            length = None
        else:
            raise TroplaneError("INVALID_PL", f"no piece {kind}{idx} on this curve")
        bps = [q(b) for b in bps]
        slopes = [q(s) for s in slopes]
        if len(slopes) != len(bps) + 1:
            raise TroplaneError("INVALID_PL", f"piece {kind}{idx}: need one more slope than breakpoints")
        if any(s.denominator != 1 for s in slopes):
            raise TroplaneError("INVALID_PL", f"piece {kind}{idx}: slopes must be integers")
        prev = Fraction(0)
        for b in bps:
            if b <= prev or (length is not None and b >= length):
                raise TroplaneError("INVALID_PL", f"piece {kind}{idx}: breakpoints must increase inside the piece")
            prev = b
        if length is None and slopes[-1] != 0:
            raise TroplaneError("INVALID_PL", f"ray {idx}: function must be constant far out")
        out[key] = (bps, slopes)
    return out


def _increment(length: Fraction, bps, slopes) -> Fraction:
    total, prev = Fraction(0), Fraction(0)
    for b, s in zip(list(bps) + [length], slopes):
        total += s * (b - prev)
        prev = b
    return total


def pl_vertex_values(curve: TropicalCurve, phi: PLFunction) -> dict[int, Fraction]:
    """Values at vertices; raises ``INVALID_PL`` if the function is discontinuous."""
    pieces = _checked_pieces(curve, phi)
    values: dict[int, Fraction] = {}
    for root in range(len(curve.vertices)):
        if root in values:
            continue
        values[root] = q(phi.anchor_value) if root == 0 else Fraction(0)
        queue = deque([root])
        while queue:
            i = queue.popleft()
            for k, e in enumerate(curve.bounded_edges):
                if i not in (e.u, e.v):
                    continue
                bps, slopes = pieces.get(("e", k), ((), (Fraction(0),)))
                inc = _increment(e.length, bps, slopes)
                j, val = (e.v, values[i] + inc) if e.u == i else (e.u, values[i] - inc)
                if j in values:
                    if values[j] != val:
                        raise TroplaneError("INVALID_PL", f"function is discontinuous along edge {k}", edge=k)
                else:
                    values[j] = val
                    queue.append(j)
    return values


def divisor_of_pl(curve: TropicalCurve, phi: PLFunction) -> Divisor:
    """Principal divisor: at each point, the sum of slopes pointing into it."""
    pieces = _checked_pieces(curve, phi)
    pl_vertex_values(curve, phi)
    chips: Counter = Counter()
    for key, (bps, slopes) in pieces.items():
        kind, idx = key
        if kind == "e":
            e = curve.bounded_edges[idx]
            chips[curve.vertices[e.u]] -= slopes[0]
            chips[curve.vertices[e.v]] += slopes[-1]
            start, direction = curve.vertices[e.u], e.direction
        else:
            r = curve.rays[idx]
            chips[curve.vertices[r.vertex]] -= slopes[0]
            start, direction = curve.vertices[r.vertex], r.direction
        for b, before, after in zip(bps, slopes, slopes[1:]):
            chips[L.add(start, L.scale(b, direction))] += before - after
    return Divisor(tuple((p, int(m)) for p, m in chips.items()), curve)


# ---------------------------------------------------------------------------
# Abel-Jacobi on the cycle

@dataclass(frozen=True)
class AbelJacobiClass:
    degree: int
    position: Fraction
    length: Fraction

    def to_json(self) -> dict:
        return {"degree": self.degree, "position": L.fmt_q(self.position), "cycle_length": L.fmt_q(self.length)}


def _cycle_arclength(curve: TropicalCurve, cyc: Cycle, arcs: dict[int, Fraction], loc: Location) -> Fraction:
    if loc.kind == "v":
        return arcs[loc.index]
    pos = cyc.edges.index(loc.index)
    start = arcs[cyc.vertices[pos]]
    if cyc.signs[pos] == 1:
        return start + loc.t
    return start + curve.bounded_edges[loc.index].length - loc.t


def cycle_position(curve: TropicalCurve, p: Sequence, cyc: Optional[Cycle] = None) -> Fraction:
    """Counterclockwise lattice arclength from the anchor to the retraction of ``p``."""
    cyc = cyc or cycle_of(curve)
    arcs = cyc.arclengths(curve)
    loc = locate(curve, p)
    if loc.kind == "e" and loc.index in cyc.edges:
        return _cycle_arclength(curve, cyc, arcs, loc)
    attach = attachment_vertices(curve, cyc)
    if loc.kind == "v":
        v = loc.index
    elif loc.kind == "e":
        v = curve.bounded_edges[loc.index].u
    else:
        v = curve.rays[loc.index].vertex
    return arcs[attach[v]]


def abel_jacobi(curve: TropicalCurve, D: Divisor) -> AbelJacobiClass:
    g = genus(curve)
    if g != 1:
        raise TroplaneError("WRONG_GENUS", f"curve has genus {g}, expected 1")
    cyc = cycle_of(curve)
    total = sum((m * cycle_position(curve, p, cyc) for p, m in D.chips), Fraction(0))
    return AbelJacobiClass(D.degree, total % cyc.length, cyc.length)


def _component_degrees(curve: TropicalCurve, D: Divisor) -> list[int]:
    comp = {}
    for root in range(len(curve.vertices)):
        if root in comp:
            continue
        comp[root] = root
        queue = deque([root])
        while queue:
            i = queue.popleft()
            for _, j in curve.neighbors(i):
                if j not in comp:
                    comp[j] = root
                    queue.append(j)
    deg: Counter = Counter()
    for p, m in D.chips:
        loc = locate(curve, p)
        if loc.kind == "v":
            v = loc.index
        elif loc.kind == "e":
            v = curve.bounded_edges[loc.index].u
        else:
            v = curve.rays[loc.index].vertex
        deg[comp[v]] += m
    return [deg[r] for r in sorted(set(comp.values()))]


def linearly_equivalent(curve: TropicalCurve, D: Divisor, E: Divisor) -> bool:
    g = genus(curve)
    if g == 0:
        return _component_degrees(curve, D) == _component_degrees(curve, E)
    if g == 1:
        return abel_jacobi(curve, D) == abel_jacobi(curve, E)
    raise TroplaneError("UNSUPPORTED_GENUS", f"equivalence is implemented for genus <= 1, got {g}")


# ---------------------------------------------------------------------------
# finite graph model and Dhar reduction

def _grid_index(value: Fraction, N: int, what: str) -> int:
    scaled = value * N
    if scaled.denominator != 1:
        raise TroplaneError("RESOLUTION_MISMATCH", f"{what} = {value} is not on the 1/{N} grid", value=value)
    return int(scaled)


def _graph_model(curve: TropicalCurve, locs: list[Location], N: int):
    adj: dict[tuple, list[tuple]] = {}

    def link(a, b):
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, []).append(a)

    for i in range(len(curve.vertices)):
        adj.setdefault(("v", i), [])
    for k, e in enumerate(curve.bounded_edges):
        n = _grid_index(e.length, N, f"length of edge {k}")
        chain = [("v", e.u)] + [("e", k, j) for j in range(1, n)] + [("v", e.v)]
        for a, b in zip(chain, chain[1:]):
            link(a, b)
    reach = Counter()
    for loc in locs:
        if loc.kind == "r":
            reach[loc.index] = max(reach[loc.index], _grid_index(loc.t, N, "chip position"))
    for k, r in enumerate(curve.rays):
        chain = [("v", r.vertex)] + [("r", k, j) for j in range(1, reach[k] + 2)]
        for a, b in zip(chain, chain[1:]):
            link(a, b)
    return adj


def _node_of(loc: Location, N: int):
    if loc.kind == "v":
        return ("v", loc.index)
    return (loc.kind, loc.index, _grid_index(loc.t, N, "chip position"))


def dhar_reduce(adj: Mapping, chips: Mapping, roots: Sequence) -> dict:
    """Reduced form of a divisor that is effective away from ``roots``."""
    X = Counter(chips)
    nodes = list(adj)
    while True:
        burnt = set(roots)
        hits: Counter = Counter()
        queue = deque(roots)
        while queue:
            u = queue.popleft()
            for w in adj[u]:
                if w in burnt:
                    continue
                hits[w] += 1
                if hits[w] > X[w]:
                    burnt.add(w)
                    queue.append(w)
        unburnt = [u for u in nodes if u not in burnt]
        if not unburnt:
            return {k: v for k, v in X.items() if v}
        inside = set(unburnt)
        for u in unburnt:
            for w in adj[u]:
                if w not in inside:
                    X[u] -= 1
                    X[w] += 1


def equivalent_bruteforce(curve: TropicalCurve, D: Divisor, E: Divisor, N: int) -> bool:
    """Decide ``D ~ E`` on the graph model of ``curve`` subdivided at resolution ``1/N``."""
    if N <= 0:
        raise TroplaneError("RESOLUTION_MISMATCH", "resolution must be a positive integer")
    dl = [(locate(curve, p), m) for p, m in D.chips]
    el = [(locate(curve, p), m) for p, m in E.chips]
    adj = _graph_model(curve, [l for l, _ in dl + el], N)
    xd, xe = Counter(), Counter()
    for loc, m in dl:
        xd[_node_of(loc, N)] += m
    for loc, m in el:
        xe[_node_of(loc, N)] += m
    pad = Counter()
    for node in set(xd) | set(xe):
        pad[node] = max(0, -xd[node]) + max(0, -xe[node])
    xd.update(pad)
    xe.update(pad)
    # one root per connected component
    roots, seen = [], set()
    for start in adj:
        if start in seen:
            continue
        roots.append(start)
        seen.add(start)
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for w in adj[u]:
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
    return dhar_reduce(adj, xd, roots) == dhar_reduce(adj, xe, roots)


# ---------------------------------------------------------------------------
# classification and cells of |D_Gamma|

def _on_cycle(loc: Location, cyc: Cycle) -> bool:
    return (loc.kind == "v" and loc.index in cyc.vertices) or (loc.kind == "e" and loc.index in cyc.edges)


def is_internal(curve: TropicalCurve, D: Divisor) -> bool:
    """At least two chips on the cycle, or a single one inside a cycle edge.

    Chips are counted with multiplicity.
    """
    g = genus(curve)
    if g == 0:
        return True
    if g != 1:
        raise TroplaneError("UNSUPPORTED_GENUS", f"internal divisors are defined here for genus <= 1, got {g}")
    if not D.is_effective():
        raise TroplaneError("NOT_EFFECTIVE", "classification needs an effective divisor")
    cyc = cycle_of(curve)
    on = [(loc, m) for loc, m in ((locate(curve, p), m) for p, m in D.chips) if _on_cycle(loc, cyc)]
    count = sum(m for _, m in on)
    if count >= 2:
        return True
    return count == 1 and on[0][0].kind == "e"


@dataclass(frozen=True)
class DivisorCell:
    pinned: tuple[int, ...]  # vertex ids, repeated by multiplicity
    free_edges: tuple[PieceKey, ...]  # carrier of each free chip, repeated by multiplicity
    dimension: int
    degree: int
    genus: int
    maximal: bool
    internal: bool
    exposed: bool

    def generalized_internal(self, k: Optional[int] = None) -> bool:
        k = len(self.pinned) if k is None else k
        return self.dimension == self.degree - self.genus - k

    def to_json(self) -> dict:
        return {
            "pinned": list(self.pinned),
            "edges": [f"{kind}{i}" for kind, i in self.free_edges],
            "dim": self.dimension,
            "maximal": self.maximal,
            "exposed": self.exposed,
            "internal": self.internal,
        }


def cell_dimension(curve: TropicalCurve, pinned: Sequence[int], free_edges: Sequence[PieceKey]) -> int:
    """Free chip parameters minus the Abel-Jacobi constraint, when it binds."""
    dim = len(free_edges)
    if genus(curve) == 1:
        cyc = cycle_of(curve)
        if any(kind == "e" and idx in cyc.edges for kind, idx in free_edges):
            dim -= 1
    return dim


def cell_of(curve: TropicalCurve, D: Divisor) -> DivisorCell:
    g = genus(curve)
    if g != 1:
        raise TroplaneError("WRONG_GENUS", f"curve has genus {g}, expected 1")
    if not D.is_effective() or not linearly_equivalent(curve, D, self_intersection(curve)):
        raise TroplaneError("NOT_IN_LINEAR_SYSTEM", "divisor is not an effective divisor equivalent to the self-intersection")
    cyc = cycle_of(curve)
    pinned, free = [], []
    for p, m in D.chips:
        loc = locate(curve, p)
        if loc.kind == "v":
            pinned += [loc.index] * m
        else:
            free += [(loc.kind, loc.index)] * m
    pinned.sort()
    free.sort()
    dim = cell_dimension(curve, pinned, free)
    internal = is_internal(curve, D)
    exposed = (
        internal
        and len(pinned) == 2
        and len(set(pinned)) == 2
        and all(v in cyc.vertices for v in pinned)
        and not any(kind == "e" and idx in cyc.edges for kind, idx in free)
    )
    return DivisorCell(tuple(pinned), tuple(free), dim, D.degree, g, not pinned, internal, exposed)


