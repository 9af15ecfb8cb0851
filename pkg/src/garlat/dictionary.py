"""Conversions between Garside lattices, Garside flag complexes and weak orders.

Everything works on finite windows.  A window is a ball of the lattice graph
(``x ~ y`` when ``x < y <= φ(x)``) and a vertex is *interior* when it and its
images under ``φ`` and ``φ⁻¹`` lie at depth at most ``radius - 1``; only
interior vertices are used to certify the local axioms.

The flag-complex condition relating the order to ``φ`` is checked in the form
``a < b  ⇔  b ≤ φ(a)`` for ``b ≠ a``, where ``≤`` on vertices means "equal or
joined by an edge oriented upwards".  Both ``b = a`` and ``b = φ(a)`` are
therefore admitted on the right-hand side.

>>> from garlat.zaction import ZnLattice
>>> F = lattice_to_flag(lattice_window(ZnLattice(1), radius=3))
>>> sorted(F.edges.values())[:3], check_flag(F).ok
([1, 1, 1], True)
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import networkx as nx

from .graph import BallGraph, FiniteGraph, ParseError, label_str
from .order import GradedRelation, OrderError, check_weak_order, generate_order_t, is_lattice
from .zaction import ZLattice, build_lattice_ball, monotone_path

CONVENTION = "a<b iff b<=phi(a), for b != a; b=a and b=phi(a) admitted on the right"


class DictionaryError(ValueError):
    """Input rejected by a conversion."""


# ---------------------------------------------------------------------------
# lattice windows


@dataclass
class LatticeWindow:
    """A ball of a Garside lattice with its order, grading and ``φ = shift by 1``."""

    L: ZLattice
    ball: BallGraph
    keys: tuple
    points: dict
    depth: dict
    radius: int

    def leq(self, a, b) -> bool:
        return self.L.leq(self.points[a], self.points[b])

    def phi(self, a, k: int = 1):
        key = self.L.key(self.L.shift(self.points[a], k))
        return key if key in self.points else None

    def interior(self, a) -> bool:
        r = self.radius - 1
        if self.depth[a] > r:
            return False
        up, down = self.phi(a, 1), self.phi(a, -1)
        return up is not None and down is not None and self.depth[up] <= r and self.depth[down] <= r


def lattice_window(L: ZLattice, center=None, radius: int = 2, cap: int = 200_000) -> LatticeWindow:
    """Window of ``L`` about ``center``; rejects a non-increasing ``φ``."""
    c = L.base_point() if center is None else center
    if L.eq(L.shift(c, 1), c) or not L.leq(c, L.shift(c, 1)):
        raise DictionaryError("phi must be increasing: phi(x) > x fails at the center")
    ball = build_lattice_ball(L, c, radius, cap)
    keys = tuple(ball.labels)
    return LatticeWindow(
        L, ball, keys, dict(zip(keys, ball.points)), {k: int(d) for k, d in zip(keys, ball.depth)}, radius
    )


# ---------------------------------------------------------------------------
# flag complexes


@dataclass
class FlagComplex:
    """Vertices, upward edges ``(a, b) -> ℓ``, a partial ``φ`` and the interior."""

    vertices: tuple
    edges: dict
    phi: dict
    interior: frozenset
    radius: int | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self._out = {v: set() for v in self.vertices}
        self._in = {v: set() for v in self.vertices}
        for a, b in self.edges:
            self._out[a].add(b)
            self._in[b].add(a)

    def out(self, a) -> set:
        return self._out[a]

    def into(self, a) -> set:
        return self._in[a]

    def leq(self, a, b) -> bool:
        return a == b or (a, b) in self.edges

    def adjacent(self, a, b) -> bool:
        return (a, b) in self.edges or (b, a) in self.edges

    def interval(self, a) -> list:
        """``[a, φ(a)]`` as a list of vertices, or ``None`` if ``φ(a)`` is unknown."""
        top = self.phi.get(a)
        if top is None:
            return None
        mid = sorted(self.out(a) & self.into(top), key=self._pos)
        return [a] + [m for m in mid if m != top] + [top]

    def _pos(self, v):
        if not hasattr(self, "_index"):
            self._index = {u: i for i, u in enumerate(self.vertices)}
        return self._index[v]

    def interval_relation(self, a) -> GradedRelation:
        iv = self.interval(a)
        pairs = [(x, y, self.edges[(x, y)]) for x in iv for y in iv if (x, y) in self.edges]
        return GradedRelation.from_pairs(iv, pairs)

    def triangles(self):
        for a in self.vertices:
            for b in sorted(self.out(a), key=self._pos):
                for c in sorted(self.out(b) & self.out(a), key=self._pos):
                    yield a, b, c

    def with_label(self, edge, value: int) -> FlagComplex:
        edges = dict(self.edges)
        if edge not in edges:
            raise KeyError(edge)
        edges[edge] = value
        return FlagComplex(self.vertices, edges, dict(self.phi), self.interior, self.radius, dict(self.meta))

    # -- file format -----------------------------------------------------

    def to_json(self) -> str:
        s = label_str
        data = {
            "vertices": [s(v) for v in self.vertices],
            "edges": sorted([s(a), s(b), int(ell)] for (a, b), ell in self.edges.items()),
            "phi": {s(a): s(b) for a, b in self.phi.items()},
            "interior": sorted(s(v) for v in self.interior),
            "radius": self.radius,
            "convention": CONVENTION,
        }
        return json.dumps(data, indent=1, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> FlagComplex:
        try:
            data = json.loads(text)
            verts = tuple(data["vertices"])
            known = set(verts)
            edges = {}
            for a, b, ell in data["edges"]:
                if a not in known or b not in known:
                    raise ParseError(f"edge ({a}, {b}) mentions an unknown vertex")
                edges[(a, b)] = int(ell)
            phi = {a: b for a, b in data.get("phi", {}).items() if b in known}
            interior = frozenset(data.get("interior", verts))
        except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
            if isinstance(exc, ParseError):
                raise
            raise ParseError(f"bad flag-complex file: {exc}") from exc
        return cls(verts, edges, phi, interior, data.get("radius"))


def lattice_to_flag(w: LatticeWindow) -> FlagComplex:
    """Edges ``a -> b`` for ``a < b <= φ(a)``, labelled by the grade gap."""
    L = w.L
    edges = {}
    for a in w.keys:
        pa = w.points[a]
        for q in L.unit_interval(pa):
            b = L.key(q)
            if b == a or b not in w.points:
                continue
            edges[(a, b)] = L.grade_gap(pa, q)
    phi = {a: w.phi(a) for a in w.keys if w.phi(a) is not None}
    interior = frozenset(a for a in w.keys if w.interior(a))
    if not interior:
        raise DictionaryError("window too small: no interior vertex")
    return FlagComplex(w.keys, edges, phi, interior, w.radius, {"source": getattr(L, "name", type(L).__name__)})


# ---------------------------------------------------------------------------
# axiom checker


@dataclass
class FlagReport:
    checks: dict = field(default_factory=dict)
    convention: str = CONVENTION

    def record(self, name, ok, witness=None):
        prev = self.checks.get(name)
        if prev is not None and not prev["ok"]:
            return
        self.checks[name] = {"ok": bool(ok), "witness": witness}

    @property
    def ok(self) -> bool:
        return all(c["ok"] for c in self.checks.values())

    def failures(self) -> dict:
        return {k: v["witness"] for k, v in self.checks.items() if not v["ok"]}

    def to_dict(self) -> dict:
        return {"ok": self.ok, "convention": self.convention, "checks": self.checks}


def check_flag(F: FlagComplex) -> FlagReport:
    """Length additivity, the ``φ`` condition, interval lattices and flagness."""
    s = label_str
    rep = FlagReport()
    for k in ("length_additivity", "phi_condition", "interval_lattice", "flagness", "phi_increasing"):
        rep.record(k, True)
    for (a, b), ell in F.edges.items():
        if ell <= 0:
            rep.record("length_additivity", False, {"edge": [s(a), s(b)], "label": ell})
    for a, b, c in F.triangles():
        lab, lbc, lac = F.edges[(a, b)], F.edges[(b, c)], F.edges[(a, c)]
        if lab + lbc != lac:
            rep.record("length_additivity", False, {"triangle": [s(a), s(b), s(c)], "labels": [lab, lbc, lac]})
    # a cyclically oriented triangle would be a clique that is not a chain
    for a in F.vertices:
        for b in F.out(a):
            for c in F.out(b):
                if (c, a) in F.edges:
                    rep.record("flagness", False, {"cycle": [s(a), s(b), s(c)]})
    for a in F.vertices:
        if a not in F.interior:
            continue
        top = F.phi.get(a)
        if top is None or (a, top) not in F.edges:
            rep.record("phi_increasing", False, {"vertex": s(a)})
            continue
        want = ({top} | F.into(top)) - {a}
        have = F.out(a)
        if want != have:
            diff = sorted(s(v) for v in want ^ have)
            rep.record("phi_condition", False, {"vertex": s(a), "phi": s(top), "mismatch": diff})
            continue
        lat = is_lattice(F.interval_relation(a))
        if not lat.is_lattice:
            rep.record(
                "interval_lattice",
                False,
                {"vertex": s(a), "pair": [s(x) for x in lat.failing_pair], "missing": lat.missing},
            )
    return rep


# ---------------------------------------------------------------------------
# weak orders


@dataclass
class WeakOrderResult:
    relation: GradedRelation
    generated: GradedRelation
    report: dict


def flag_to_weak_order(F: FlagComplex) -> WeakOrderResult:
    """The vertex relation of ``F``, the order it generates and the hypothesis report."""
    ax = check_flag(F)
    if not ax.ok:
        raise DictionaryError(f"flag axioms fail: {ax.failures()}")
    pairs = [(a, b, ell) for (a, b), ell in F.edges.items()]
    W = GradedRelation.from_pairs(F.vertices, pairs)
    wo = check_weak_order(W)
    intervals_ok = all(is_lattice(F.interval_relation(a)).is_lattice for a in F.interior)
    gen = generate_order_t(W, F.phi)
    if not isinstance(gen, GradedRelation):
        raise DictionaryError(f"generated relation has a cycle {gen.cycle}")
    report = {
        "condition_star": wo.condition_star,
        "homogeneous": wo.homogeneous,
        "weak_order": wo.is_weak_order,
        "phi_increasing": ax.checks["phi_increasing"]["ok"],
        "interval_lattices": intervals_ok,
        "simply_connected": "assumed",
        "weak_order_notes": {k: [label_str(x) for x in v] if isinstance(v, tuple) else v for k, v in wo.failures.items()},
        "convention": CONVENTION,
        "radius": F.radius,
    }
    return WeakOrderResult(W, gen, report)


@dataclass
class RoundTrip:
    pairs: int
    certified: int
    unsound: list
    incomplete: list

    @property
    def ok(self) -> bool:
        return not self.unsound and not self.incomplete

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "pairs": self.pairs,
            "certified": self.certified,
            "unsound": [[label_str(a), label_str(b)] for a, b in self.unsound[:10]],
            "incomplete": [[label_str(a), label_str(b)] for a, b in self.incomplete[:10]],
        }


def roundtrip(w: LatticeWindow) -> RoundTrip:
    """Compare the generated order with the lattice order on the window.

    Every generated comparison must hold in ``L``.  Conversely ``a <= b`` in
    ``L`` must be generated whenever the canonical chain ``x -> (x+1) ∧ b``
    from ``a`` to ``b`` stays inside the window, which certifies the pair.
    """
    F = lattice_to_flag(w)
    gen = flag_to_weak_order(F).generated
    L = w.L
    unsound, incomplete = [], []
    pairs = certified = 0
    for a in w.keys:
        for b in w.keys:
            pairs += 1
            lt = gen.leq(a, b)
            ll = w.leq(a, b)
            if lt and not ll:
                unsound.append((a, b))
            if ll and lt and gen.length(a, b) != L.grade_gap(w.points[a], w.points[b]):
                unsound.append((a, b))
            if ll:
                path = monotone_path(L, w.points[a], w.points[b])
                if all(L.key(p) in w.points for p in path):
                    certified += 1
                    if not lt:
                        incomplete.append((a, b))
    return RoundTrip(pairs, certified, unsound, incomplete)


# ---------------------------------------------------------------------------
# germs


def germ_to_special(germ, base=None, radius: int = 2, cap: int = 200_000) -> LatticeWindow:
    """Window of the lattice of morphisms from ``base``, after checking the germ.

    Specialness is verified on the window: for each edge ``f -> g`` exactly
    one simple ``s`` satisfies ``f·s = g``.
    """
    from .garside import GarsideLattice, check_germ, multiply, simple_morphism, target

    flat = [o for o in germ.objects if germ.delta_length(o) == 0]
    if flat:
        raise DictionaryError(f"phi must be increasing: Δ is an identity at {flat[0]}")
    rep = check_germ(germ)
    if not rep.ok:
        raise DictionaryError(f"germ rejected: {rep.failures()}")
    L = GarsideLattice(germ, base)
    w = lattice_window(L, radius=radius, cap=cap)
    F = lattice_to_flag(w)
    for (a, b) in F.edges:
        f, g = w.points[a], w.points[b]
        src = target(germ, f)
        hits = 0
        for s in germ.simples_from(src):
            if multiply(germ, f, simple_morphism(germ, s)) == g:
                hits += 1
        if hits != 1:
            raise DictionaryError(f"not special: {hits} simples carry {label_str(a)} to {label_str(b)}")
    return w


# ---------------------------------------------------------------------------
# typed Ã₂ complexes


def typed_a2_to_flag(g: FiniteGraph, tau: dict, m_range: tuple[int, int], interior=None) -> FlagComplex:
    """Flag complex on ``(x, m)`` with ``m ≡ τ(x) mod 3`` and ``m_lo <= m <= m_hi``.

    ``(x, n) -> (y, m)`` is an edge when ``x ~ y`` and ``n < m < n + 3``, or
    ``x = y`` and ``m = n + 3``; its label is ``m - n`` and
    ``φ(x, n) = (x, n + 3)``.  ``interior`` defaults to the vertices of
    depth at most ``radius - 1`` for a :class:`BallGraph`.
    """
    lo, hi = m_range
    labels = list(g.labels)
    nbrs = {x: [labels[j] for j in g.neighbors(i)] for i, x in enumerate(labels)}
    for x in labels:
        for y in nbrs[x]:
            if tau[x] % 3 == tau[y] % 3:
                raise DictionaryError(f"adjacent vertices {label_str(x)}, {label_str(y)} share type {tau[x] % 3}")
    if interior is None:
        if isinstance(g, BallGraph):
            interior = {g.labels[i] for i in range(len(labels)) if g.depth[i] <= g.radius - 1}
        else:
            interior = set(labels)
    verts = [(x, m) for x in labels for m in range(lo, hi + 1) if (m - tau[x]) % 3 == 0]
    vs = set(verts)
    edges = {}
    for x, n in verts:
        if (x, n + 3) in vs:
            edges[((x, n), (x, n + 3))] = 3
        for y in nbrs[x]:
            for m in (n + 1, n + 2):
                if (y, m) in vs:
                    edges[((x, n), (y, m))] = m - n
    phi = {(x, n): (x, n + 3) for x, n in verts if (x, n + 3) in vs}
    inner = frozenset((x, n) for x, n in verts if x in interior and lo <= n - 3 and n + 3 <= hi)
    return FlagComplex(tuple(verts), edges, phi, inner, getattr(g, "radius", None), {"source": "typed-a2"})


def coxeter_a2_ball(radius: int) -> tuple[BallGraph, dict]:
    """The Ã₂ Coxeter complex ball as the ℤ³ quotient, typed by coordinate sum mod 3."""
    from .zaction import ZnLattice, build_quotient_ball

    b = build_quotient_ball(ZnLattice(3), radius=radius)
    tau = {lab: sum(p) % 3 for lab, p in zip(b.labels, b.points)}
    return b, tau


def a2_to_z3(vertex) -> tuple:
    """``(class, m)`` to the representative of the class with coordinate sum ``m``."""
    x, m = vertex
    s = sum(x)
    k, r = divmod(m - s, 3)
    if r:
        raise DictionaryError(f"type mismatch at {vertex}")
    return tuple(c + k for c in x)


def flag_embeds(F: FlagComplex, G: FlagComplex, f) -> list:
    """Mismatches of the vertex map ``f`` from ``F`` into ``G`` on edges, labels and ``φ``."""
    bad = []
    img = {v: f(v) for v in F.vertices}
    if len(set(img.values())) != len(img):
        bad.append(("not-injective",))
    gv = set(G.vertices)
    inv = {w: v for v, w in img.items()}
    for v, w in img.items():
        if w not in gv:
            bad.append(("missing-vertex", v))
    for (a, b), ell in F.edges.items():
        if G.edges.get((img[a], img[b])) != ell:
            bad.append(("edge", a, b))
    for (c, d) in G.edges:
        if c in inv and d in inv and (inv[c], inv[d]) not in F.edges:
            bad.append(("extra-edge", inv[c], inv[d]))
    for a, b in F.phi.items():
        if G.phi.get(img[a]) != img[b]:
            bad.append(("phi", a))
    return bad


def interval_digraph(F: FlagComplex, a) -> nx.DiGraph:
    """Cover relations of ``[a, φ(a)]``."""
    rel = F.interval_relation(a)
    iv = list(rel.elements)
    D = nx.DiGraph()
    D.add_nodes_from(iv)
    for x in iv:
        for y in iv:
            if x != y and rel.leq(x, y):
                if not any(z not in (x, y) and rel.leq(x, z) and rel.leq(z, y) for z in iv):
                    D.add_edge(x, y)
    return D


def subspace_digraph(n: int, p: int) -> nx.DiGraph:
    """Cover relations of the subspace lattice of F_p^n."""
    from . import fq

    spaces = [W for k in range(n + 1) for W in fq.subspaces(n, p, k)]
    keys = [tuple(map(tuple, W)) for W in spaces]
    D = nx.DiGraph()
    D.add_nodes_from(keys)
    for W, kw in zip(spaces, keys):
        for V, kv in zip(spaces, keys):
            if len(V) == len(W) + 1 and fq.contains(V, W, p):
                D.add_edge(kw, kv)
    return D


def flag_from_json_file(path: str) -> FlagComplex:
    with open(path) as fh:
        return FlagComplex.from_json(fh.read())


__all__ = [
    "CONVENTION", "DictionaryError", "LatticeWindow", "lattice_window", "FlagComplex", "lattice_to_flag",
    "FlagReport", "check_flag", "flag_to_weak_order", "roundtrip", "RoundTrip", "germ_to_special",
    "typed_a2_to_flag", "coxeter_a2_ball", "a2_to_z3", "flag_embeds", "interval_digraph", "subspace_digraph",
    "OrderError",
]
