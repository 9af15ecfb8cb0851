"""Triangle and quadrangle conditions on finite graphs and certified balls.

Every check returns three-valued :class:`Outcome` records.  On a plain
:class:`~garlat.graph.FiniteGraph` everything is adjudicated.  On a
:class:`~garlat.graph.BallGraph` a basepoint at depth ``a`` has margin
``rho = radius - a``: distances up to ``rho`` are exact, so TC at radius
``n <= rho`` and QC at ``n <= rho - 1`` are decided and the rest are
``inconclusive``.

>>> from garlat.wmcheck import cycle_graph, check_TC
>>> check_TC(cycle_graph(5), 0, 2).status
'fail'
"""

from __future__ import annotations

import itertools
from dataclasses import asdict, dataclass, field

import networkx as nx
import numpy as np

from . import _kernels
from .graph import FiniteGraph, label_str

PASS, FAIL, INCONCLUSIVE = "pass", "fail", "inconclusive"


@dataclass(frozen=True)
class Outcome:
    condition: str
    basepoint: object
    n: int
    status: str
    instances: int = 0
    failures: int = 0
    counterexample: tuple | None = None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["basepoint"] = label_str(self.basepoint)
        if self.counterexample is not None:
            d["counterexample"] = [label_str(v) for v in self.counterexample]
        return d


@dataclass
class WMVerdict:
    outcomes: list = field(default_factory=list)
    triangles: int = 0
    squares: int = 0
    notes: dict = field(default_factory=dict)

    def count(self, status: str) -> int:
        return sum(o.status == status for o in self.outcomes)

    @property
    def ok(self) -> bool:
        return self.count(FAIL) == 0

    def failures(self) -> list:
        return [o for o in self.outcomes if o.status == FAIL]

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "summary": {s: self.count(s) for s in (PASS, FAIL, INCONCLUSIVE)},
            "census": {"triangles": self.triangles, "squares": self.squares},
            "notes": self.notes,
            "outcomes": [o.to_dict() for o in self.outcomes],
        }

    def table(self) -> str:
        """Plain-text summary: one row per basepoint, condition and radius."""
        rows = [f"{'basepoint':>16} {'cond':>4} {'n':>3} {'status':>12} {'inst':>6}"]
        for o in self.outcomes:
            rows.append(f"{label_str(o.basepoint):>16} {o.condition:>4} {o.n:>3} {o.status:>12} {o.instances:>6}")
        return "\n".join(rows) + "\n"


def _limits(g: FiniteGraph, x: int, dist: np.ndarray) -> tuple[int, int, int]:
    """(largest reported radius, largest decided TC radius, largest decided QC radius)."""
    top = int(dist.max(initial=0))
    rho = g.margin(x)
    if rho == float("inf"):
        return top, top, top
    rho = int(rho)
    return top, min(top, rho), min(top, rho - 1)


def _qc_apex(g: FiniteGraph, dist, y: int, z: int) -> int:
    lev = dist[y]
    common = np.intersect1d(g.neighbors(y), g.neighbors(z))
    return int(next(w for w in common if dist[w] == lev + 1))


def scan_basepoint(g: FiniteGraph, x: int, nmin: int = 2, nmax: int | None = None, use_numba=None) -> list[Outcome]:
    """TC and QC outcomes at basepoint index ``x`` for radii ``nmin..nmax``."""
    if not 0 <= x < len(g):
        raise IndexError(f"{x} is not a vertex index")
    dist = g.dist_from(x)
    top, tc_hi, qc_hi = _limits(g, x, dist)
    if nmax is None:
        nmax = top
    base = g.labels[x]
    out: list[Outcome] = []
    inst_t, fail_t, first_t = _kernels.tc_scan(g.indptr, g.indices, dist, max(tc_hi, 0), use_numba)
    inst_q, fail_q, first_q = _kernels.qc_scan(g.indptr, g.indices, dist, max(qc_hi, 0), use_numba)
    for n in range(nmin, nmax + 1):
        if n <= tc_hi:
            if fail_t[n]:
                a, b = (int(v) for v in first_t[n])
                ce = (base, g.labels[a], g.labels[b])
                out.append(Outcome("TC", base, n, FAIL, int(inst_t[n]), int(fail_t[n]), ce))
            else:
                out.append(Outcome("TC", base, n, PASS, int(inst_t[n])))
        else:
            out.append(Outcome("TC", base, n, INCONCLUSIVE))
        if n <= qc_hi:
            if fail_q[n]:
                a, b = (int(v) for v in first_q[n])
                t = _qc_apex(g, dist, a, b)
                ce = (base, g.labels[a], g.labels[b], g.labels[t])
                out.append(Outcome("QC", base, n, FAIL, int(inst_q[n]), int(fail_q[n]), ce))
            else:
                out.append(Outcome("QC", base, n, PASS, int(inst_q[n])))
        else:
            out.append(Outcome("QC", base, n, INCONCLUSIVE))
    return out


def _one(g: FiniteGraph, x, n: int, cond: str, use_numba=None) -> Outcome:
    if n < 2:
        raise ValueError("n must be at least 2")
    i = g.vertex(x) if x in g.index else x
    if not isinstance(i, (int, np.integer)) or not 0 <= i < len(g):
        raise KeyError(f"{x!r} is not a vertex")
    for o in scan_basepoint(g, int(i), n, n, use_numba):
        if o.condition == cond:
            return o
    raise AssertionError


def check_TC(g: FiniteGraph, x, n: int, use_numba=None) -> Outcome:
    """Triangle condition at basepoint ``x`` (label, or index) and radius ``n``."""
    return _one(g, x, n, "TC", use_numba)


def check_QC(g: FiniteGraph, x, n: int, use_numba=None) -> Outcome:
    """Quadrangle condition at basepoint ``x`` and radius ``n``."""
    return _one(g, x, n, "QC", use_numba)


def census(g: FiniteGraph) -> tuple[int, int]:
    """Number of triangles and of induced 4-cycles."""
    tri = 0
    for i, j in g.edges():
        common = np.intersect1d(g.neighbors(i), g.neighbors(j))
        tri += int((common > j).sum())
    # squares: pairs of non-adjacent vertices with common neighbours a, b non-adjacent
    sq = 0
    for i in range(len(g)):
        for j in range(i + 1, len(g)):
            if g.has_edge(i, j):
                continue
            common = np.intersect1d(g.neighbors(i), g.neighbors(j))
            for a, b in itertools.combinations(common, 2):
                if not g.has_edge(int(a), int(b)):
                    sq += 1
    return tri, sq // 2


def check_weak_modularity(g: FiniteGraph, basepoints=None, nmax=None, use_numba=None, with_census=True) -> WMVerdict:
    """TC and QC at every (or the given) basepoint index, over all decidable radii."""
    v = WMVerdict()
    pts = range(len(g)) if basepoints is None else basepoints
    for x in pts:
        v.outcomes.extend(scan_basepoint(g, int(x), 2, nmax, use_numba))
    if with_census:
        v.triangles, v.squares = census(g)
    return v


def check_local_weak_modularity(g: FiniteGraph, use_numba=None) -> WMVerdict:
    """TC and QC at radius 2 for every basepoint, with the triangle/square census."""
    v = WMVerdict()
    for x in range(len(g)):
        v.outcomes.extend(scan_basepoint(g, x, 2, 2, use_numba))
    v.triangles, v.squares = census(g)
    return v


# ---------------------------------------------------------------------------
# strengthened conditions


def _cliques_upto(sub: nx.Graph, cap: int):
    """Every clique of size <= cap that is maximal, or a cap-subset of a larger one."""
    seen = set()
    for c in nx.find_cliques(sub):
        c = tuple(sorted(c))
        if len(c) <= cap:
            if c not in seen:
                seen.add(c)
                yield c
        else:
            for s in itertools.combinations(c, cap):
                if s not in seen:
                    seen.add(s)
                    yield s


def check_strong_conditions(g: FiniteGraph, x: int, max_clique: int = 6) -> list[Outcome]:
    """Strengthened triangle (STC) and quadrangle (SQC) conditions at index ``x``.

    STC: every clique in the sphere of radius ``n`` (up to ``max_clique``
    vertices) has a common neighbour at distance ``n - 1``.  Checking the
    maximal cliques suffices, since sub-cliques inherit the neighbour.
    SQC: for each ``t`` at distance ``n + 1`` the set ``Y`` of its neighbours at
    distance ``n`` has a common neighbour at ``n - 1`` and a member adjacent to
    all other members.
    """
    dist = g.dist_from(x)
    top, tc_hi, qc_hi = _limits(g, x, dist)
    base = g.labels[x]
    nbr = [set(map(int, g.neighbors(i))) for i in range(len(g))]
    level = {n: [i for i in range(len(g)) if dist[i] == n] for n in range(top + 1)}
    out = []
    for n in range(2, top + 1):
        if n > tc_hi:
            out.append(Outcome("STC", base, n, INCONCLUSIVE))
            continue
        sub = nx.Graph()
        sub.add_nodes_from(level[n])
        sub.add_edges_from((i, j) for i in level[n] for j in nbr[i] if dist[j] == n and i < j)
        below = set(level[n - 1])
        count, bad = 0, None
        nfail = 0
        for c in _cliques_upto(sub, max_clique):
            count += 1
            common = below.intersection(*(nbr[i] for i in c))
            if not common:
                nfail += 1
                if bad is None:
                    bad = (base,) + tuple(g.labels[i] for i in c)
        status = FAIL if nfail else PASS
        out.append(Outcome("STC", base, n, status, count, nfail, bad))
    for n in range(2, top + 1):
        if n > qc_hi:
            out.append(Outcome("SQC", base, n, INCONCLUSIVE))
            continue
        below = set(level[n - 1])
        count, bad, nfail = 0, None, 0
        for t in level.get(n + 1, []):
            Y = sorted(j for j in nbr[t] if dist[j] == n)
            if not Y:
                continue
            count += 1
            common = below.intersection(*(nbr[i] for i in Y))
            dominated = any(all(j == s or j in nbr[s] for j in Y) for s in Y)
            if not common or not dominated:
                nfail += 1
                if bad is None:
                    bad = (base, g.labels[t]) + tuple(g.labels[i] for i in Y)
        out.append(Outcome("SQC", base, n, FAIL if nfail else PASS, count, nfail, bad))
    return out


# ---------------------------------------------------------------------------
# small fixture graphs


def cycle_graph(n: int) -> FiniteGraph:
    return FiniteGraph.from_edges(range(n), [(i, (i + 1) % n) for i in range(n)])


def complete_graph(n: int) -> FiniteGraph:
    return FiniteGraph.from_edges(range(n), itertools.combinations(range(n), 2))


def complete_bipartite(a: int, b: int) -> FiniteGraph:
    return FiniteGraph.from_edges(range(a + b), [(i, a + j) for i in range(a) for j in range(b)])


def hypercube(k: int) -> FiniteGraph:
    return FiniteGraph.from_edges(range(2**k), [(i, i ^ (1 << b)) for i in range(2**k) for b in range(k) if i < i ^ (1 << b)])


def path_graph(n: int) -> FiniteGraph:
    return FiniteGraph.from_edges(range(n), [(i, i + 1) for i in range(n - 1)])


def replay(counterexample: dict, g: FiniteGraph) -> bool:
    """Re-verify a recorded failure; True when it still is a failure.

    ``counterexample`` is an :class:`Outcome` dictionary as written to reports.
    """
    cond = counterexample["condition"]
    ce = counterexample["counterexample"]
    names = {label_str(v): i for i, v in enumerate(g.labels)}
    idx = [names[c] for c in ce]
    x = idx[0]
    dist = g.dist_from(x)
    n = int(counterexample["n"])
    if cond == "TC":
        a, b = idx[1], idx[2]
        if not (g.has_edge(a, b) and dist[a] == dist[b] == n):
            return False
        return not any(dist[w] == n - 1 and g.has_edge(w, b) for w in g.neighbors(a))
    if cond == "QC":
        a, b, t = idx[1], idx[2], idx[3]
        if g.has_edge(a, b) or not (dist[a] == dist[b] == n and dist[t] == n + 1):
            return False
        if not (g.has_edge(a, t) and g.has_edge(b, t)):
            return False
        return not any(dist[w] == n - 1 and g.has_edge(w, b) for w in g.neighbors(a))
    if cond == "STC":
        Y = idx[1:]
        cand = set(np.nonzero(dist == n - 1)[0].tolist())
        for y in Y:
            cand &= set(map(int, g.neighbors(y)))
        return not cand
    if cond == "SQC":
        t, Y = idx[1], idx[2:]
        cand = set(np.nonzero(dist == n - 1)[0].tolist())
        for y in Y:
            cand &= set(map(int, g.neighbors(y)))
        dominated = any(all(j == s or g.has_edge(s, j) for j in Y) for s in Y)
        return not cand or not dominated
    raise ValueError(f"unknown condition {cond!r}")
