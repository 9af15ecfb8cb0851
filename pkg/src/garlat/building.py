"""O-lattices in F_p((t))^n and the Ã_{n-1} building as a ℤ-acted lattice.

An O-lattice is stored as ``Λ = t^{-e} Ŝ`` where ``t^N L0 ⊆ Ŝ ⊆ L0``,
``Ŝ ⊄ t L0`` and ``N`` is minimal.  ``Ŝ`` is recorded through the subspace
``S = Ŝ / t^N L0`` of ``V_N = (F_p[t]/t^N)^n``, seen as an F_p-space with
coordinate ``j*n + i`` for ``t^j e_i``, in reduced row echelon form.  This
triple is unique per lattice, so it doubles as a hash key.

Ordered by inclusion, with ``Λ + 1 = t^{-1} Λ``, the lattices form a
:class:`~garlat.zaction.ZLattice` whose quotient graph is the 1-skeleton of
the building.

>>> B = NormLattice(3, 2)
>>> L0 = B.base_point()
>>> len([m for m in B.unit_interval(L0)])
16
>>> building_type(canonicalize(diag_matrix([1, 0, 0], 2), 2))
1
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import fq
from .garside import Germ, GermError, free_abelian_germ
from .graph import BallGraph, CapExceeded, ball_by_expansion
from .zaction import ZLattice, build_quotient_ball


class WindowOverflow(ValueError):
    """A lattice does not fit in the configured valuation window."""


class SingularMatrix(ValueError):
    """The columns do not span a full-rank lattice."""


@dataclass(frozen=True)
class OLattice:
    n: int
    p: int
    e: int
    N: int
    rows: tuple  # RREF basis of S, each row a tuple of length n*N

    @cached_property
    def S(self) -> np.ndarray:
        return np.array(self.rows, dtype=np.int64).reshape(len(self.rows), self.n * self.N)

    @property
    def grade(self) -> int:
        """``log_p [Λ : L0]`` (virtual index); increases with inclusion."""
        return self.n * self.e + len(self.rows) - self.n * self.N

    @property
    def val_det(self) -> int:
        return -self.grade

    def class_key(self) -> str:
        """Key of the homothety class."""
        body = "/".join("".join(str(c) for c in r) for r in self.rows)
        return f"{self.N}:{body}"

    def key(self) -> str:
        return f"{self.e}@{self.class_key()}"

    def __str__(self) -> str:
        return format_matrix(basis_matrix(self))


def building_type(a: OLattice) -> int:
    return a.val_det % a.n


# ---------------------------------------------------------------------------
# frames and normalisation


def _embed(S: np.ndarray, n: int, N: int, d: int, M: int) -> np.ndarray:
    """``t^d Ŝ / t^M L0`` inside ``V_M`` for ``Ŝ/t^N L0 = S``; needs ``M >= N + d``."""
    if M < N + d:
        raise WindowOverflow("window too small for the requested frame")
    rows = np.zeros((len(S) + n * (M - N - d), n * M), dtype=np.int64)
    if len(S):
        rows[: len(S), n * d: n * (d + N)] = S
    for k, c in enumerate(range(n * (N + d), n * M)):
        rows[len(S) + k, c] = 1
    return rows


def _normalise(rows: np.ndarray, n: int, p: int, E: int, M: int) -> OLattice:
    """Canonical form of ``t^{-E} Ŝ`` where ``Ŝ/t^M L0`` has basis ``rows`` in ``V_M``."""
    R = fq.rref(rows, p) if len(rows) else np.zeros((0, n * M), dtype=np.int64)
    if len(R) == 0:
        # Ŝ = t^M L0
        return OLattice(n, p, E - M, 0, ())
    c = min(int(np.nonzero(r)[0][0]) for r in R) // n
    R = R[:, n * c:]
    M -= c
    E -= c
    N = M
    while N > 0:
        block = np.zeros((n, n * M), dtype=np.int64)
        for i in range(n):
            block[i, n * (N - 1) + i] = 1
        if not fq.contains(R, block, p):
            break
        N -= 1
    T = fq.rref(R[:, : n * N], p) if N else np.zeros((0, 0), dtype=np.int64)
    return OLattice(n, p, E, N, tuple(tuple(int(v) for v in r) for r in T))


def _common(a: OLattice, b: OLattice):
    E = max(a.e, b.e)
    M = max(a.N + E - a.e, b.N + E - b.e)
    return E, M, _embed(a.S, a.n, a.N, E - a.e, M), _embed(b.S, b.n, b.N, E - b.e, M)


def lat_meet(a: OLattice, b: OLattice) -> OLattice:
    """Intersection of two lattices."""
    E, M, A, B = _common(a, b)
    SA = fq.rref(A, a.p) if len(A) else A
    SB = fq.rref(B, a.p) if len(B) else B
    return _normalise(fq.intersect(SA, SB, a.p), a.n, a.p, E, M)


def lat_join(a: OLattice, b: OLattice) -> OLattice:
    """Sum of two lattices."""
    E, M, A, B = _common(a, b)
    return _normalise(np.vstack([A, B]), a.n, a.p, E, M)


def lat_leq(a: OLattice, b: OLattice) -> bool:
    E, M, A, B = _common(a, b)
    SB = fq.rref(B, a.p) if len(B) else B
    return fq.contains(SB, A, a.p)


def homothety(a: OLattice, k: int) -> OLattice:
    """``t^{-k} Λ``."""
    return OLattice(a.n, a.p, a.e + k, a.N, a.rows)


def base_lattice(n: int, p: int) -> OLattice:
    fq.check_prime(p)
    return OLattice(n, p, 0, 0, ())


# ---------------------------------------------------------------------------
# matrices over F_p[t, t^-1]


@dataclass(frozen=True)
class LaurentMatrix:
    """Square matrix ``t^v · C(t)`` with ``C`` polynomial; ``coeffs[i, j, d]`` is the t^d coefficient."""

    coeffs: np.ndarray
    v: int = 0

    @property
    def n(self) -> int:
        return self.coeffs.shape[0]


def diag_matrix(exps, p: int) -> LaurentMatrix:
    """``diag(t^{k_1}, …, t^{k_n})``."""
    n = len(exps)
    lo = min(exps)
    D = max(exps) - lo + 1
    c = np.zeros((n, n, D), dtype=np.int64)
    for i, k in enumerate(exps):
        c[i, i, k - lo] = 1
    return LaurentMatrix(c, lo)


def matmul(a: LaurentMatrix, b: LaurentMatrix, p: int) -> LaurentMatrix:
    n = a.n
    Da, Db = a.coeffs.shape[2], b.coeffs.shape[2]
    out = np.zeros((n, n, Da + Db - 1), dtype=np.int64)
    for d in range(Da):
        for f in range(Db):
            out[:, :, d + f] += a.coeffs[:, :, d] @ b.coeffs[:, :, f]
    return LaurentMatrix(out % p, a.v + b.v)


def constant_matrix(g, p: int) -> LaurentMatrix:
    g = np.asarray(g, dtype=np.int64) % p
    return LaurentMatrix(g[:, :, None].copy(), 0)


def canonicalize(m: LaurentMatrix, p: int, max_window: int = 64) -> OLattice:
    """Canonical form of the O-span of the columns of ``m``.

    The window grows until the truncated span contains ``t^{N-1} V_N``; by
    Nakayama's lemma the span then contains ``t^{N-1} L0``, so the truncation
    loses nothing.
    """
    fq.check_prime(p)
    n = m.n
    C = m.coeffs % p
    # drop leading zero degrees so the valuation shift is tight
    nz = [d for d in range(C.shape[2]) if C[:, :, d].any()]
    if not nz:
        raise SingularMatrix("zero matrix")
    lo = nz[0]
    C = C[:, :, lo:]
    v = m.v + lo
    D = C.shape[2]
    for M in range(1, max_window + 1):
        rows = []
        for k in range(n):
            for j in range(M):
                vec = np.zeros(n * M, dtype=np.int64)
                for d in range(min(D, M - j)):
                    vec[n * (j + d): n * (j + d) + n] = C[:, k, d]
                rows.append(vec)
        S = fq.rref(np.array(rows), p)
        block = np.zeros((n, n * M), dtype=np.int64)
        for i in range(n):
            block[i, n * (M - 1) + i] = 1
        if fq.contains(S, block, p):
            return _normalise(S, n, p, -v, M)
    raise SingularMatrix(f"no full-rank window up to {max_window}; matrix singular or window overflow")


def _generators(a: OLattice) -> np.ndarray:
    """Rows in ``V_{N+1}`` lifting a basis of ``Ŝ / tŜ``."""
    n, p, N = a.n, a.p, a.N
    full = _embed(a.S, n, N, 0, N + 1)
    tS = _embed(a.S, n, N, 1, N + 1)
    basis = fq.rref(tS, p) if len(tS) else tS
    gens = []
    for row in full:
        cand = np.vstack([basis, row[None, :]])
        r = fq.rref(cand, p)
        if len(r) > len(basis):
            gens.append(row)
            basis = r
    if len(gens) != n:
        raise AssertionError("quotient by tŜ does not have dimension n")
    return np.array(gens)


def basis_matrix(a: OLattice) -> LaurentMatrix:
    """An O-basis of the lattice as the columns of a Laurent matrix."""
    n = a.n
    G = _generators(a)
    D = a.N + 1
    c = np.zeros((n, n, D), dtype=np.int64)
    for k, g in enumerate(G):
        for d in range(D):
            c[:, k, d] = g[n * d: n * d + n]
    return LaurentMatrix(c, -a.e)


def format_matrix(m: LaurentMatrix) -> str:
    """Rows of Laurent polynomials, e.g. ``[t^-1, 0; 1+t, t]``."""
    n = m.n
    rows = []
    for i in range(n):
        cells = []
        for j in range(n):
            terms = []
            for d in range(m.coeffs.shape[2]):
                c = int(m.coeffs[i, j, d])
                if not c:
                    continue
                k = d + m.v
                mono = "1" if k == 0 else ("t" if k == 1 else f"t^{k}")
                terms.append(mono if c == 1 else (f"{c}" if k == 0 else f"{c}{mono}"))
            cells.append("+".join(terms) if terms else "0")
        rows.append(", ".join(cells))
    return "[" + "; ".join(rows) + "]"


# ---------------------------------------------------------------------------
# the norm lattice as a ZLattice


class NormLattice(ZLattice):
    """All O-lattices of F_p((t))^n, ordered by inclusion, with ``Λ + 1 = t^{-1}Λ``."""

    def __init__(self, n: int, p: int):
        fq.check_prime(p)
        self.n, self.p = n, p
        self.name = f"building:{n}:{p}"
        self._spaces = [W for k in range(n + 1) for W in fq.subspaces(n, p, k)]

    def base_point(self):
        return base_lattice(self.n, self.p)

    def leq(self, a, b):
        return lat_leq(a, b)

    def meet(self, a, b):
        return lat_meet(a, b)

    def join(self, a, b):
        return lat_join(a, b)

    def shift(self, a, k):
        return homothety(a, k)

    def grade_gap(self, a, b):
        return b.grade - a.grade

    def cofinality_bound(self, a, b):
        return max(0, b.N - b.e + a.e, a.N - a.e + b.e)

    def unit_interval(self, a):
        """Lattices between ``Λ`` and ``t^{-1}Λ``: ``t^{-1}(tŜ + W)`` for subspaces ``W``."""
        n, N = self.n, a.N
        tS = _embed(a.S, n, N, 1, N + 1)
        G = _generators(a)
        out = []
        for W in self._spaces:
            rows = np.vstack([tS, (W @ G) % self.p]) if len(W) else tS
            out.append(_normalise(rows, n, self.p, a.e + 1, N + 1))
        return out

    def orbit_key(self, a):
        return a.class_key()

    def key(self, a):
        return a.key()


# ---------------------------------------------------------------------------
# the building ball by direct enumeration


def _completion(W: np.ndarray, n: int, p: int) -> np.ndarray:
    """Invertible matrix whose first ``k`` columns span ``W``."""
    cols = [w for w in W]
    basis = fq.rref(np.array(cols), p) if cols else np.zeros((0, n), dtype=np.int64)
    for i in range(n):
        u = np.zeros(n, dtype=np.int64)
        u[i] = 1
        r = fq.rref(np.vstack([basis, u[None, :]]), p) if len(basis) else u[None, :]
        if len(r) > len(basis):
            cols.append(u)
            basis = r
    return np.array(cols).T


def class_neighbours(a: OLattice, spaces=None):
    """Classes ``[M]`` with ``tΛ ⊊ M ⊊ Λ``, computed from an explicit basis matrix."""
    n, p = a.n, a.p
    if spaces is None:
        spaces = [W for k in range(1, n) for W in fq.subspaces(n, p, k)]
    B = basis_matrix(a)
    for W in spaces:
        k = len(W)
        g = constant_matrix(_completion(W, n, p), p)
        d = diag_matrix([0] * k + [1] * (n - k), p)
        M = canonicalize(matmul(matmul(B, g, p), d, p), p)
        M = OLattice(n, p, 0, M.N, M.rows)
        yield M.class_key(), M


def building_ball(n: int, q: int, radius: int, cap: int = 200_000) -> BallGraph:
    """Ball of the building's 1-skeleton about ``[L0]`` by neighbour expansion."""
    fq.check_prime(q)
    spaces = [W for k in range(1, n) for W in fq.subspaces(n, q, k)]
    L0 = base_lattice(n, q)
    return ball_by_expansion(L0.class_key(), L0, lambda a: class_neighbours(a, spaces), radius, cap)


def building_quotient_ball(n: int, q: int, radius: int, cap: int = 200_000) -> BallGraph:
    """The same ball obtained as the quotient graph of :class:`NormLattice`."""
    L = NormLattice(n, q)
    return build_quotient_ball(L, L.base_point(), radius, cap)


# ---------------------------------------------------------------------------
# germs


def _difference_set(q: int):
    """A planar (Singer) difference set of order ``q`` in ``Z/(q²+q+1)``."""
    v = q * q + q + 1
    for D in itertools.combinations(range(v), q + 1):
        diffs = sorted((a - b) % v for a in D for b in D if a != b)
        if diffs == list(range(1, v)):
            return v, D
    raise GermError(f"no planar difference set of order {q}")


def _search(v: int, lam, limit):
    pairs = [(x, y) for x in range(v) for y in sorted(lam[x])]
    assign: dict = {}
    found = 0

    def place(x, y, z):
        trip = [(x, y, z), (y, z, x), (z, x, y)]
        if any(assign.get((a, b), c) != c for a, b, c in trip):
            return None
        added = list(dict.fromkeys((a, b) for a, b, c in trip if (a, b) not in assign))
        for a, b, c in trip:
            assign[(a, b)] = c
        return added

    def rec(i):
        nonlocal found
        while i < len(pairs) and pairs[i] in assign:
            i += 1
        if i == len(pairs):
            found += 1
            yield dict(assign)
            return
        x, y = pairs[i]
        for z in sorted(lam[y]):
            if x not in lam[z]:
                continue
            added = place(x, y, z)
            if added is None:
                continue
            yield from rec(i + 1)
            if limit is not None and found >= limit:
                return
            for k in added:
                del assign[k]

    yield from rec(0)


def triangle_presentations(q: int, limit: int | None = 1):
    """Triangle presentations over the Singer plane of order ``q``.

    A presentation is a set ``T`` of point triples, closed under rotation,
    such that for each ``x`` and each ``y`` on the line ``λ(x)`` there is
    exactly one ``z`` with ``(x, y, z) ∈ T``; then ``z ∈ λ(y)`` and
    ``x ∈ λ(z)``.  Point-line bijections ``λ(x) = x + k + D`` are tried for
    each ``k`` in turn.  Results are ``(k, T)`` with ``T`` a dict ``(x, y) -> z``.

    >>> k, T = next(triangle_presentations(2))
    >>> len(T)
    21
    """
    v, D = _difference_set(q)
    found = 0
    for k in range(v):
        lam = [frozenset((x + d + k) % v for d in D) for x in range(v)]
        for T in _search(v, lam, None if limit is None else limit - found):
            found += 1
            yield k, T
            if limit is not None and found >= limit:
                return


def triangle_germ(q: int, T: dict, name: str | None = None) -> Germ:
    """One-object germ ``a_x a_y = b_z`` for ``(x, y, z) ∈ T``, ``a_x b_x = b_x a_x = Δ``."""
    v = q * q + q + 1
    obj = "*"
    a = [f"a{x}" for x in range(v)]
    b = [f"b{x}" for x in range(v)]
    simples = ("e",) + tuple(a) + tuple(b) + ("D",)
    length = {"e": 0, "D": 3, **{s: 1 for s in a}, **{s: 2 for s in b}}
    product = {}
    for (x, y), z in T.items():
        product[(a[x], a[y])] = b[z]
    for x in range(v):
        product[(a[x], b[x])] = "D"
        product[(b[x], a[x])] = "D"
    g = Germ(
        objects=(obj,),
        simples=simples,
        source={s: obj for s in simples},
        target={s: obj for s in simples},
        length=length,
        product=product,
        delta={obj: "D"},
        phi_objects={obj: obj},
        phi_simples={s: s for s in simples},
        name=name or f"triangle:{q}",
        aliases={"1": "e"},
    )
    return g


def tree_germ(q: int) -> Germ:
    """One-object germ for the (q+1)-regular tree: ``q + 1`` atoms with ``a·a = Δ``."""
    obj = "*"
    lines = [f"l{i}" for i in range(q + 1)]
    simples = ("e",) + tuple(lines) + ("D",)
    product = {(s, s): "D" for s in lines}
    return Germ(
        objects=(obj,),
        simples=simples,
        source={s: obj for s in simples},
        target={s: obj for s in simples},
        length={"e": 0, "D": 2, **{s: 1 for s in lines}},
        product=product,
        delta={obj: "D"},
        phi_objects={obj: obj},
        phi_simples={s: s for s in simples},
        name=f"subspace:2:{q}",
        aliases={"1": "e"},
    )


def subspace_germ(n: int, q: int) -> Germ:
    """Germ whose simples are the subspaces of F_q^n, realised with one object.

    ``n = 1`` gives the free abelian germ on one generator, ``n = 2`` the
    tree germ and ``n = 3`` the germ of the first triangle presentation found
    over the Singer plane of order ``q``.
    """
    fq.check_prime(q)
    if n == 1:
        return free_abelian_germ(1)
    if n == 2:
        return tree_germ(q)
    if n == 3:
        found = next(triangle_presentations(q, limit=1), None)
        if found is None:
            raise GermError(f"no triangle presentation of order {q}")
        return triangle_germ(q, found[1], name=f"subspace:3:{q}")
    raise GermError("subspace_germ supports n <= 3")


def building_wm(n: int, q: int, radius: int, cap: int = 200_000):
    from .wmcheck import check_weak_modularity

    b = building_ball(n, q, radius, cap)
    return b, check_weak_modularity(b, with_census=False)


__all__ = [
    "OLattice", "NormLattice", "LaurentMatrix", "canonicalize", "lat_meet", "lat_join", "lat_leq",
    "building_ball", "building_quotient_ball", "subspace_germ", "triangle_presentations", "triangle_germ",
    "tree_germ", "basis_matrix", "diag_matrix", "building_type", "CapExceeded", "WindowOverflow",
    "SingularMatrix",
]
