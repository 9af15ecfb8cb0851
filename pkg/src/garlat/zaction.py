"""Lattices with an increasing ℤ-action, their two graphs, and explicit witnesses.

A :class:`ZLattice` supplies the order, meet, join and the shift ``x + k``.
From it we build two graphs:

* the *quotient graph* on orbits, with ``x ~ y`` when some lifts satisfy
  ``x0 <= y0 <= x0 + 1``;
* the *lattice graph* on points, with ``x ~ y`` when ``x <= y <= x + 1`` or
  ``y <= x <= y + 1``.

Distances in both graphs have closed forms in terms of :meth:`ZLattice.min_shift`,
and the triangle/quadrangle witnesses are built from meets exactly as in the
constructive proofs.

>>> Z = ZnLattice(3)
>>> quotient_distance(Z, (0, 0, 0), (2, 1, 0))
2
>>> lattice_distance(Z, (0, 0, 0), (1, 1, -1)).distance
2
"""

from __future__ import annotations

import itertools
from collections import Counter
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from functools import reduce
from typing import Hashable, Sequence

from .graph import BallGraph, ball_by_expansion


class WitnessPreconditionError(ValueError):
    """The configuration handed to a witness constructor is not of the stated shape."""


class ZLattice(ABC):
    """A lattice with an order-preserving, increasing ℤ-action."""

    name = "zlattice"

    @abstractmethod
    def leq(self, x, y) -> bool: ...

    @abstractmethod
    def meet(self, x, y): ...

    @abstractmethod
    def join(self, x, y): ...

    @abstractmethod
    def shift(self, x, k: int): ...

    @abstractmethod
    def grade_gap(self, x, y) -> int:
        """Length of ``x <= y``; only meaningful when ``x <= y``."""

    @abstractmethod
    def cofinality_bound(self, x, y) -> int:
        """Some ``k >= 0`` with ``x - k <= y <= x + k``."""

    @abstractmethod
    def unit_interval(self, x) -> list:
        """All ``y`` with ``x <= y <= x + 1``, including both ends."""

    @abstractmethod
    def orbit_key(self, x) -> Hashable:
        """Key shared exactly by the points of one orbit."""

    def key(self, x) -> Hashable:
        return x

    def base_point(self):
        raise NotImplementedError

    def min_shift(self, x, y) -> int:
        """The least integer ``h`` with ``x <= y + h``.

        The default searches ``[-k, k]`` for the cofinality bound ``k``;
        ``x <= y + h`` is monotone in ``h`` so a bisection suffices.
        """
        k = self.cofinality_bound(x, y)
        lo, hi = -k, k
        while lo < hi:
            mid = (lo + hi) // 2
            if self.leq(x, self.shift(y, mid)):
                hi = mid
            else:
                lo = mid + 1
        return lo

    def gaps(self, x, y) -> tuple[int, int]:
        """``(min_shift(x, y), min_shift(y, x))``; subclasses may share work."""
        return self.min_shift(x, y), self.min_shift(y, x)

    def lt(self, x, y) -> bool:
        return self.key(x) != self.key(y) and self.leq(x, y)

    def meet_all(self, xs):
        return reduce(self.meet, xs)

    def join_all(self, xs):
        return reduce(self.join, xs)

    def eq(self, x, y) -> bool:
        return self.key(x) == self.key(y)

    def same_orbit(self, x, y) -> bool:
        return self.orbit_key(x) == self.orbit_key(y)


class ZnLattice(ZLattice):
    """ℤⁿ with the product order and the diagonal action ``x + k = x + (k,…,k)``."""

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("n must be positive")
        self.n = n
        self.name = f"zn:{n}"
        self._cube = list(itertools.product((0, 1), repeat=n))

    def base_point(self):
        return (0,) * self.n

    def leq(self, x, y):
        return all(a <= b for a, b in zip(x, y))

    def meet(self, x, y):
        return tuple(min(a, b) for a, b in zip(x, y))

    def join(self, x, y):
        return tuple(max(a, b) for a, b in zip(x, y))

    def shift(self, x, k):
        return tuple(a + k for a in x)

    def grade_gap(self, x, y):
        return sum(b - a for a, b in zip(x, y))

    def cofinality_bound(self, x, y):
        return max(abs(b - a) for a, b in zip(x, y))

    def min_shift(self, x, y):
        return max(a - b for a, b in zip(x, y))

    def unit_interval(self, x):
        return [tuple(a + e for a, e in zip(x, c)) for c in self._cube]

    def orbit_key(self, x):
        m = min(x)
        return tuple(a - m for a in x)

    def key(self, x):
        return tuple(x)


# ---------------------------------------------------------------------------
# distances


def quotient_distance(L: ZLattice, x0, y0) -> int:
    """Distance between the orbits of ``x0`` and ``y0`` in the quotient graph.

    With the lift normalised so that ``x0 <= y0 + h`` for the least such
    ``h``, the distance is the least ``n`` with ``y0 + h <= x0 + n``.
    """
    a, b = L.gaps(x0, y0)
    return a + b


def quotient_lift(L: ZLattice, x0, y0):
    """The unique lift of ``y0``'s orbit in ``[x0, x0 + n]`` with ``n`` the distance."""
    return L.shift(y0, L.min_shift(x0, y0))


@dataclass(frozen=True)
class LatticeDistance:
    distance: int
    n: int  # least n >= 0 with x <= y + n
    m: int  # least m >= 0 with y <= x + m
    geodesic: tuple


def monotone_path(L: ZLattice, x, y) -> list:
    """The path ``(x + k) ∧ y`` from ``x`` to ``y``; requires ``x <= y``."""
    if not L.leq(x, y):
        raise ValueError("monotone_path needs x <= y")
    k = max(0, L.min_shift(y, x))
    return [L.meet(L.shift(x, i), y) for i in range(k + 1)]


def lattice_gaps(L: ZLattice, x, y) -> tuple[int, int]:
    a, b = L.gaps(x, y)
    return max(0, a), max(0, b)


def lattice_distance(L: ZLattice, x, y, with_path: bool = True) -> LatticeDistance:
    """Distance in the lattice graph, with a geodesic through ``x ∧ y``."""
    n, m = lattice_gaps(L, x, y)
    path: tuple = ()
    if with_path:
        w = L.meet(x, y)
        down = monotone_path(L, w, x)
        up = monotone_path(L, w, y)
        path = tuple(reversed(down)) + tuple(up[1:])
    return LatticeDistance(n + m, n, m, path)


# ---------------------------------------------------------------------------
# quotient witnesses


def _lift_above(L: ZLattice, a, b):
    """The lift of ``b`` with ``a <= b' <= a + 1``, or None when not adjacent/equal."""
    b1 = L.shift(b, L.min_shift(a, b))
    return b1 if L.leq(b1, L.shift(a, 1)) else None


def quotient_triangle_witness(L: ZLattice, x0, y0, z0):
    """A point ``u0`` whose orbit is one step closer to ``x`` and adjacent to ``y`` and ``z``.

    Preconditions: ``d(x, y) = d(x, z) = n >= 2`` and ``d(y, z) = 1`` in the
    quotient graph.
    """
    n = quotient_distance(L, x0, y0)
    if n < 2 or quotient_distance(L, x0, z0) != n or quotient_distance(L, y0, z0) != 1:
        raise WitnessPreconditionError("need d(x,y) = d(x,z) >= 2 and d(y,z) = 1")
    y0 = quotient_lift(L, x0, y0)
    z0 = _lift_above(L, y0, z0)
    if not L.leq(z0, L.shift(x0, n)):
        # then x0 + 1 <= z0 <= x0 + n + 1; swap roles of y and z
        y0, z0 = L.shift(z0, -1), y0
    return L.meet(L.shift(x0, n - 1), y0)


def quotient_quadrangle_witness(L: ZLattice, x0, y0, z0, t0):
    """Witness ``u0`` for the quadrangle condition in the quotient graph.

    Preconditions: ``d(x,y) = d(x,z) = n >= 2``, ``d(y,t) = d(z,t) = 1`` and
    ``d(x,t) = n + 1``.
    """
    n = quotient_distance(L, x0, y0)
    if (
        n < 2
        or quotient_distance(L, x0, z0) != n
        or quotient_distance(L, y0, t0) != 1
        or quotient_distance(L, z0, t0) != 1
        or quotient_distance(L, x0, t0) != n + 1
    ):
        raise WitnessPreconditionError("need d(x,y) = d(x,z) = n >= 2, d(y,t) = d(z,t) = 1, d(x,t) = n + 1")
    y0 = quotient_lift(L, x0, y0)
    z0 = quotient_lift(L, x0, z0)
    t0 = _lift_above(L, y0, t0)
    if not (L.leq(z0, t0) and L.leq(t0, L.shift(z0, 1))):
        raise AssertionError("lift of t is not in [z0, z0 + 1]")
    s0 = L.meet(y0, z0)
    return L.meet(L.shift(x0, n - 1), s0)


def strong_triangle_witness(L: ZLattice, x0, Y: Sequence):
    """Common neighbour, one step closer to ``x``, of a clique at distance ``n``.

    The lifts of the clique members in ``[x0, x0 + n]`` form a chain whose
    meet ``v0`` satisfies ``z0 - 1 <= v0 <= z0`` for every lift ``z0``.
    """
    Y = list(Y)
    if not Y:
        raise WitnessPreconditionError("empty clique")
    n = quotient_distance(L, x0, Y[0])
    if n < 1 or any(quotient_distance(L, x0, y) != n for y in Y):
        raise WitnessPreconditionError("clique vertices must share one positive distance from x")
    for a, b in itertools.combinations(Y, 2):
        if quotient_distance(L, a, b) != 1:
            raise WitnessPreconditionError("Y is not a clique")
    if len(Y) == 1:
        # a single vertex: any (x0 + n - 1) ∧ y0 works
        return L.meet(L.shift(x0, n - 1), quotient_lift(L, x0, Y[0]))
    lifts = [quotient_lift(L, x0, y) for y in Y]
    v0 = L.meet_all(lifts)
    return L.meet(L.shift(x0, n - 1), v0)


def strong_quadrangle_check(L: ZLattice, x0, t0, Y: Sequence):
    """Witness for the strengthened quadrangle condition.

    ``Y`` must be the full set of neighbours of ``t`` at distance ``n`` from
    ``x`` where ``d(x, t) = n + 1``.  Returns ``(u0, s)`` with ``u0`` adjacent
    to all of ``Y`` and ``s`` an element of ``Y`` adjacent to the others.
    """
    Y = list(Y)
    n = quotient_distance(L, x0, t0) - 1
    if n < 1 or any(quotient_distance(L, x0, y) != n or quotient_distance(L, y, t0) != 1 for y in Y):
        raise WitnessPreconditionError("Y must lie in the sphere of radius n and around t")
    lifts = [quotient_lift(L, x0, y) for y in Y]
    s0 = L.meet_all(lifts)
    u0 = L.meet(L.shift(x0, n - 1), s0)
    dominating = None
    for i, y in enumerate(Y):
        if all(j == i or quotient_distance(L, y, z) == 1 for j, z in enumerate(Y)):
            dominating = y
            break
    return u0, dominating


# ---------------------------------------------------------------------------
# lattice-graph witnesses


@dataclass(frozen=True)
class TriangleWitness:
    u: object
    case: str
    p: int
    m: int


def lattice_triangle_witness(L: ZLattice, x, y, z) -> TriangleWitness:
    """Witness for the triangle condition in the lattice graph.

    Preconditions: ``d(x, y) = d(x, z) = n >= 2`` and ``d(y, z) = 1``.
    """
    if L.leq(z, y):
        y, z = z, y
    if not (L.leq(y, z) and L.leq(z, L.shift(y, 1))) or L.eq(y, z):
        raise WitnessPreconditionError("y and z are not adjacent")
    p, m = lattice_gaps(L, x, y)
    pz, mz = lattice_gaps(L, x, z)
    if p + m < 2 or pz + mz != p + m:
        raise WitnessPreconditionError("need d(x,y) = d(x,z) >= 2")
    if L.leq(x, L.shift(z, p)) and L.leq(z, L.shift(x, m)):
        if m >= 1:
            return TriangleWitness(L.meet(y, L.shift(x, m - 1)), "first", p, m)
        return TriangleWitness(L.meet(L.shift(y, 1), x), "first-m0", p, m)
    if L.leq(x, L.shift(z, p - 1)) and L.leq(z, L.shift(x, m + 1)):
        return TriangleWitness(L.meet(z, L.shift(x, m)), "second", p, m)
    raise AssertionError("neither case of the dichotomy holds")


MIXED, UP, DOWN = "mixed", "up", "down"


def pair_type(L: ZLattice, a, b) -> str:
    """Classify a pair at lattice distance 2: mixed, ``a <= b <= a+2`` (up) or down."""
    if L.leq(a, L.shift(b, 1)) and L.leq(b, L.shift(a, 1)):
        return MIXED
    if L.leq(a, b):
        return UP
    if L.leq(b, a):
        return DOWN
    raise WitnessPreconditionError("pair is not at distance 2")


@dataclass(frozen=True)
class QuadrangleResult:
    tag: str
    u: object = None
    types: tuple = ()

    @property
    def constructive(self) -> bool:
        return self.u is not None


def local_quadrangle_check(L: ZLattice, x, y, z, t) -> QuadrangleResult:
    """Local quadrangle witness in the lattice graph, or the reason none is needed.

    Preconditions: ``d(x,y) = d(x,z) = 2``, ``d(x,t) = 3``, ``d(y,t) = d(z,t) = 1``.
    Tags starting with ``impossible`` name configurations that cannot coexist
    with ``t``.  With two pairs of type (2,0) the tag records which point is
    shared by both pairs (``@y``, ``@z``; none for ``x``).
    """
    d = lambda a, b: lattice_distance(L, a, b, with_path=False).distance  # noqa: E731
    if d(x, y) != 2 or d(x, z) != 2 or d(x, t) != 3 or d(y, t) != 1 or d(z, t) != 1:
        raise WitnessPreconditionError("need d(x,y) = d(x,z) = 2, d(x,t) = 3, d(y,t) = d(z,t) = 1")
    if d(y, z) != 2:
        raise WitnessPreconditionError("need d(y,z) = 2; adjacent pairs fall under the triangle condition")
    txy, txz, tyz = pair_type(L, x, y), pair_type(L, x, z), pair_type(L, y, z)
    types = (txy, txz, tyz)
    k = sum(tp != MIXED for tp in types)
    if k == 0:
        return QuadrangleResult("mixed", L.meet_all([x, y, z]), types)
    if k == 1:
        return QuadrangleResult("impossible:one-2-0", None, types)
    if k == 3:
        return QuadrangleResult("impossible:three-2-0", None, types)
    # two (2,0) pairs share an apex c; the witness only needs d(u, -) = 1 for all three
    # points, so the argument runs with c in the role of x
    if tyz == MIXED:
        c, a, b, ta, tb = x, y, z, txy, txz
    elif txz == MIXED:
        c, a, b, ta, tb = y, x, z, _flip(txy), tyz
    else:
        c, a, b, ta, tb = z, x, y, _flip(txz), _flip(tyz)
    suffix = "" if c is x else ("@y" if c is y else "@z")
    if ta == UP and tb == UP:
        return QuadrangleResult("two-up" + suffix, L.meet_all([L.shift(c, 1), a, b]), types)
    if ta == DOWN and tb == DOWN:
        return QuadrangleResult("two-down" + suffix, L.join_all([L.shift(c, -1), a, b]), types)
    return QuadrangleResult("impossible:opposite" + suffix, None, types)


def _flip(tp: str) -> str:
    return {UP: DOWN, DOWN: UP}.get(tp, tp)


# ---------------------------------------------------------------------------
# balls


def lattice_neighbours(L: ZLattice, x):
    """Points adjacent to ``x`` in the lattice graph."""
    kx = L.key(x)
    seen = {kx}
    for y in itertools.chain(L.unit_interval(x), L.unit_interval(L.shift(x, -1))):
        ky = L.key(y)
        if ky not in seen:
            seen.add(ky)
            yield ky, y


def quotient_neighbours(L: ZLattice, x):
    """Orbits adjacent to the orbit of ``x`` in the quotient graph."""
    own = L.orbit_key(x)
    seen = {own}
    for y in L.unit_interval(x):
        ky = L.orbit_key(y)
        if ky not in seen:
            seen.add(ky)
            yield ky, y


def build_lattice_ball(L: ZLattice, center=None, radius: int = 1, cap: int = 200_000) -> BallGraph:
    """Ball of the lattice graph; ``points[i]`` is the lattice point of vertex ``i``."""
    if center is None:
        center = L.base_point()
    return ball_by_expansion(L.key(center), center, lambda p: lattice_neighbours(L, p), radius, cap)


def build_quotient_ball(L: ZLattice, center=None, radius: int = 1, cap: int = 200_000) -> BallGraph:
    """Ball of the quotient graph; ``points[i]`` is a representative of orbit ``i``."""
    if center is None:
        center = L.base_point()
    return ball_by_expansion(L.orbit_key(center), center, lambda p: quotient_neighbours(L, p), radius, cap)


# ---------------------------------------------------------------------------
# audits against breadth-first search


@dataclass
class DistanceAudit:
    pairs: int = 0
    mismatches: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches


def distance_audit(L: ZLattice, ball: BallGraph, quotient: bool = False) -> DistanceAudit:
    """Compare the gap formula with BFS on every certified pair of ``ball``."""
    out = DistanceAudit()
    depth = ball.depth
    for i in range(len(ball)):
        row = ball.dist_from(i)
        for j in range(i, len(ball)):
            d = int(row[j])
            if (int(depth[i]) + int(depth[j]) + d) // 2 > ball.radius:
                continue
            out.pairs += 1
            x, y = ball.points[i], ball.points[j]
            f = quotient_distance(L, x, y) if quotient else lattice_distance(L, x, y, with_path=False).distance
            if f != d:
                out.mismatches.append((ball.labels[i], ball.labels[j], f, d))
    return out


@dataclass
class WitnessAudit:
    tc_instances: int = 0
    qc_instances: int = 0
    tc_cases: Counter = field(default_factory=Counter)
    qc_tags: Counter = field(default_factory=Counter)
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        bad_tags = [t for t in self.qc_tags if t.startswith("impossible")]
        return not self.failures and not bad_tags


def witness_audit(L: ZLattice, ball: BallGraph, basepoints=None, nmax: int | None = None) -> WitnessAudit:
    """Run the triangle witness and the local quadrangle dispatch on every decided instance.

    A basepoint ``x`` decides triangle instances up to ``n = radius - depth(x)``
    and quadrangle instances at ``n = 2`` when that margin is at least 3.
    Each constructed witness is checked against BFS distances in the ball.
    """
    out = WitnessAudit()
    nbr = [set(map(int, ball.neighbors(i))) for i in range(len(ball))]
    pts = ball.points
    key_index = {L.key(p): i for i, p in enumerate(pts)}
    if basepoints is None:
        basepoints = range(len(ball))
    for x in basepoints:
        rho = ball.margin(x)
        if rho < 2:
            continue
        dist = ball.dist_from(x)
        top = rho if nmax is None else min(rho, nmax)
        for n in range(2, top + 1):
            level = [i for i in range(len(ball)) if dist[i] == n]
            for y in level:
                for z in nbr[y]:
                    if z <= y or dist[z] != n:
                        continue
                    out.tc_instances += 1
                    w = lattice_triangle_witness(L, pts[x], pts[y], pts[z])
                    out.tc_cases[w.case] += 1
                    u = key_index.get(L.key(w.u))
                    if u is None or dist[u] != n - 1 or u not in nbr[y] or u not in nbr[z]:
                        out.failures.append(("TC", ball.labels[x], ball.labels[y], ball.labels[z], w.case))
        if rho < 3:
            continue
        for t in (i for i in range(len(ball)) if dist[i] == 3):
            Y = sorted(j for j in nbr[t] if dist[j] == 2)
            for y, z in itertools.combinations(Y, 2):
                if z in nbr[y]:
                    continue
                out.qc_instances += 1
                r = local_quadrangle_check(L, pts[x], pts[y], pts[z], pts[t])
                out.qc_tags[r.tag] += 1
                if r.u is None:
                    out.failures.append(("QC", ball.labels[x], ball.labels[y], ball.labels[z], r.tag))
                    continue
                u = key_index.get(L.key(r.u))
                if u is None or dist[u] != 1 or u not in nbr[y] or u not in nbr[z]:
                    out.failures.append(("QC", ball.labels[x], ball.labels[y], ball.labels[z], r.tag))
    return out
