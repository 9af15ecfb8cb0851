"""Finite graded relations, weak orders and lattice checks.

A :class:`GradedRelation` is a finite set of opaque element ids together with
the comparable pairs ``a <= b`` and a non-negative length on each pair.  The
element order given at construction is the canonical order used to break
ties in every report, so failure messages are reproducible.

Meets and joins are decided by enumerating common bounds; this module is the
oracle that the optimised routines elsewhere are tested against.
"""

from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping, Sequence

Element = Hashable


class OrderError(ValueError):
    """Raised for malformed input to the order routines."""


@dataclass(frozen=True)
class GradedRelation:
    elements: tuple
    lengths: Mapping[tuple, int]

    @classmethod
    def from_pairs(cls, elements: Iterable, pairs: Iterable, reflexive: bool = True) -> GradedRelation:
        """Build from ``(a, b, length)`` triples, adding ``(a, a, 0)`` if asked."""
        elements = tuple(elements)
        lengths = {}
        if reflexive:
            for a in elements:
                lengths[(a, a)] = 0
        for a, b, ell in pairs:
            lengths[(a, b)] = int(ell)
        return cls(elements, lengths)

    def __post_init__(self):
        index = {a: i for i, a in enumerate(self.elements)}
        if len(index) != len(self.elements):
            raise OrderError("duplicate elements")
        for a, b in self.lengths:
            if a not in index or b not in index:
                raise OrderError(f"pair ({a!r}, {b!r}) mentions an unknown element")
        up = defaultdict(list)
        down = defaultdict(list)
        for a, b in sorted(self.lengths, key=lambda p: (index[p[0]], index[p[1]])):
            up[a].append(b)
            down[b].append(a)
        object.__setattr__(self, "_index", index)
        object.__setattr__(self, "_up", dict(up))
        object.__setattr__(self, "_down", dict(down))

    def leq(self, a, b) -> bool:
        return (a, b) in self.lengths

    def length(self, a, b) -> int:
        return self.lengths[(a, b)]

    def up(self, a) -> list:
        return self._up.get(a, [])

    def down(self, a) -> list:
        return self._down.get(a, [])

    def position(self, a) -> int:
        return self._index[a]

    def restrict(self, subset: Iterable) -> GradedRelation:
        keep = set(subset)
        elements = tuple(a for a in self.elements if a in keep)
        lengths = {p: ell for p, ell in self.lengths.items() if p[0] in keep and p[1] in keep}
        return GradedRelation(elements, lengths)

    def interval(self, a, b) -> list:
        return [c for c in self.elements if self.leq(a, c) and self.leq(c, b)]

    # -- file format -----------------------------------------------------

    def to_json(self) -> str:
        pairs = [[str(a), str(b), ell] for (a, b), ell in self.lengths.items() if a != b]
        pairs.sort(key=lambda p: (self._index_of_str(p[0]), self._index_of_str(p[1])))
        return json.dumps({"elements": [str(a) for a in self.elements], "pairs": pairs}, indent=1)

    def _index_of_str(self, s):
        for a, i in self._index.items():
            if str(a) == s:
                return i
        return -1

    @classmethod
    def from_json(cls, text: str) -> GradedRelation:
        data = json.loads(text)
        if not isinstance(data, dict) or "elements" not in data or "pairs" not in data:
            raise OrderError("poset file needs 'elements' and 'pairs'")
        pairs = []
        for entry in data["pairs"]:
            if len(entry) == 2:
                raise OrderError(f"pair {entry!r} has no length")
            a, b, ell = entry
            pairs.append((a, b, ell))
        return cls.from_pairs(data["elements"], pairs)


@dataclass
class WeakOrderReport:
    reflexive: bool = True
    antisymmetric: bool = True
    condition_star: bool = True
    homogeneous: bool = True
    transitive: bool = True
    failures: dict = field(default_factory=dict)

    @property
    def is_weak_order(self) -> bool:
        return self.reflexive and self.antisymmetric and self.condition_star

    @property
    def is_poset(self) -> bool:
        return self.is_weak_order and self.transitive

    @property
    def ok(self) -> bool:
        return self.is_weak_order and self.homogeneous

    def to_dict(self) -> dict:
        return {
            "reflexive": self.reflexive,
            "antisymmetric": self.antisymmetric,
            "condition_star": self.condition_star,
            "homogeneous": self.homogeneous,
            "transitive": self.transitive,
            "failures": {k: [str(x) for x in v] for k, v in self.failures.items()},
        }


def _chains3(r: GradedRelation):
    """All (a, b, c, d) with a<=b, b<=c, c<=d (each step distinct), in canonical order."""
    for a in r.elements:
        for b in r.up(a):
            if b == a:
                continue
            for c in r.up(b):
                if c == b:
                    continue
                for d in r.up(c):
                    if d != c:
                        yield a, b, c, d


def check_weak_order(r: GradedRelation) -> WeakOrderReport:
    """Check reflexivity, antisymmetry, condition (*), homogeneity and transitivity.

    Condition (*) only constrains quadruples forming a chain a<=b<=c<=d, so the
    quadruples are enumerated along the relation itself; the check is exhaustive
    for every size of input.
    """
    rep = WeakOrderReport()

    def fail(name, witness):
        setattr(rep, name, False)
        rep.failures.setdefault(name, tuple(witness))

    for a in r.elements:
        if not r.leq(a, a):
            fail("reflexive", (a,))
        elif r.length(a, a) != 0:
            fail("homogeneous", (a, a))
    for a in r.elements:
        for b in r.up(a):
            if b != a and r.leq(b, a) and r.position(a) < r.position(b):
                fail("antisymmetric", (a, b))
            if b != a and r.length(a, b) <= 0:
                fail("homogeneous", (a, b))
    for a in r.elements:
        for b in r.up(a):
            for c in r.up(b):
                if a == b or b == c:
                    continue
                if not r.leq(a, c):
                    fail("transitive", (a, b, c))
                elif r.length(a, c) != r.length(a, b) + r.length(b, c):
                    fail("homogeneous", (a, b, c))
    # (*): (b,c,d) and (a,b,d) transitive  <=>  (a,b,c) and (a,c,d) transitive
    for a, b, c, d in _chains3(r):
        left = r.leq(b, d) and r.leq(a, d)
        right = r.leq(a, c) and r.leq(a, d)
        if left != right:
            fail("condition_star", (a, b, c, d))
    return rep


class Poset:
    """A transitive :class:`GradedRelation` with bitmask up/down sets."""

    def __init__(self, r: GradedRelation, check: bool = True):
        if check:
            rep = check_weak_order(r)
            if not rep.is_poset:
                bad = next(iter(rep.failures.items()))
                raise OrderError(f"not a poset: {bad[0]} fails at {bad[1]!r}")
        self.relation = r
        self.elements = r.elements
        self._bit = {a: 1 << i for i, a in enumerate(r.elements)}
        self._downmask = {a: 0 for a in r.elements}
        self._upmask = {a: 0 for a in r.elements}
        for a, b in r.lengths:
            self._downmask[b] |= self._bit[a]
            self._upmask[a] |= self._bit[b]
        self._by_down = {m: a for a, m in self._downmask.items()}
        self._by_up = {m: a for a, m in self._upmask.items()}

    def _check(self, *xs):
        for x in xs:
            if x not in self._bit:
                raise OrderError(f"{x!r} is not an element")

    def leq(self, a, b) -> bool:
        return self.relation.leq(a, b)

    def _members(self, mask):
        return [a for a in self.elements if mask & self._bit[a]]

    def lower_bounds(self, a, b) -> list:
        return self._members(self._downmask[a] & self._downmask[b])

    def upper_bounds(self, a, b) -> list:
        return self._members(self._upmask[a] & self._upmask[b])

    def meet(self, a, b):
        """Greatest common lower bound, or None.

        The meet is the unique lower bound whose down-set is the full set of
        common lower bounds.
        """
        self._check(a, b)
        return self._by_down.get(self._downmask[a] & self._downmask[b])

    def join(self, a, b):
        self._check(a, b)
        return self._by_up.get(self._upmask[a] & self._upmask[b])


def meet(p: Poset | GradedRelation, a, b):
    if isinstance(p, GradedRelation):
        p = Poset(p)
    return p.meet(a, b)


def join(p: Poset | GradedRelation, a, b):
    if isinstance(p, GradedRelation):
        p = Poset(p)
    return p.join(a, b)


@dataclass(frozen=True)
class LatticeReport:
    is_lattice: bool
    failing_pair: tuple | None = None
    missing: str | None = None
    witness: object = None

    def to_dict(self) -> dict:
        return {
            "is_lattice": self.is_lattice,
            "failing_pair": None if self.failing_pair is None else [str(x) for x in self.failing_pair],
            "missing": self.missing,
        }


def is_lattice(p: Poset | GradedRelation) -> LatticeReport:
    """Check that every pair has a meet and a join.

    The first failing pair in canonical order is reported together with which
    bound is missing; ``witness`` carries the bound that did exist, if any.
    """
    if isinstance(p, GradedRelation):
        rep = check_weak_order(p)
        if not rep.is_poset:
            name, wit = next(iter(rep.failures.items()))
            return LatticeReport(False, tuple(wit[:2]), f"poset:{name}")
        p = Poset(p, check=False)
    els = p.elements
    for i, a in enumerate(els):
        for b in els[i + 1:]:
            m = p.meet(a, b)
            j = p.join(a, b)
            if m is None:
                return LatticeReport(False, (a, b), "meet", j)
            if j is None:
                return LatticeReport(False, (a, b), "join", m)
    return LatticeReport(True)


@dataclass(frozen=True)
class CycleReport:
    cycle: tuple


def generate_order_t(w: GradedRelation, phi: Mapping | None = None) -> GradedRelation | CycleReport:
    """The order generated by weak chains of ``w``, with summed lengths.

    ``phi`` is an optional (possibly partial) automorphism; it must preserve
    the relation wherever both images are defined.  Returns a
    :class:`CycleReport` when some non-trivial weak chain closes up.
    Raises :class:`OrderError` on antisymmetry defects or when two chains
    between the same endpoints carry different total lengths.
    """
    for a in w.elements:
        for b in w.up(a):
            if a != b and w.leq(b, a):
                raise OrderError(f"antisymmetry fails at ({a!r}, {b!r})")
    if phi is not None:
        for (a, b), ell in w.lengths.items():
            if a in phi and b in phi and phi[a] in w._index and phi[b] in w._index:
                pa, pb = phi[a], phi[b]
                if not w.leq(pa, pb) or w.length(pa, pb) != ell:
                    raise OrderError(f"phi does not preserve ({a!r}, {b!r})")

    # topological order of the strict relation; a leftover vertex lies on a cycle
    indeg = {a: 0 for a in w.elements}
    for a in w.elements:
        for b in w.up(a):
            if b != a:
                indeg[b] += 1
    order = [a for a in w.elements if indeg[a] == 0]
    i = 0
    while i < len(order):
        a = order[i]
        i += 1
        for b in w.up(a):
            if b != a:
                indeg[b] -= 1
                if indeg[b] == 0:
                    order.append(b)
    if len(order) < len(w.elements):
        return CycleReport(_find_cycle(w, {a for a in w.elements if indeg[a] > 0}))

    pos = {a: i for i, a in enumerate(order)}
    lengths = {}
    for a in w.elements:
        # longest == shortest along every chain, checked by relaxing in topological order
        lo = {a: 0}
        hi = {a: 0}
        for b in order[pos[a]:]:
            if b not in lo:
                continue
            for c in w.up(b):
                if c == b:
                    continue
                ell = w.length(b, c)
                cand_lo, cand_hi = lo[b] + ell, hi[b] + ell
                if c not in lo:
                    lo[c], hi[c] = cand_lo, cand_hi
                else:
                    lo[c] = min(lo[c], cand_lo)
                    hi[c] = max(hi[c], cand_hi)
        for c in lo:
            if lo[c] != hi[c]:
                raise OrderError(f"chains from {a!r} to {c!r} have lengths {lo[c]} and {hi[c]}")
            lengths[(a, c)] = lo[c]
    return GradedRelation(w.elements, lengths)


def _find_cycle(w: GradedRelation, pool: set) -> tuple:
    start = next(a for a in w.elements if a in pool)
    seen = {start: 0}
    path = [start]
    cur = start
    while True:
        nxt = next(b for b in w.up(cur) if b != cur and b in pool)
        if nxt in seen:
            return tuple(path[seen[nxt]:]) + (nxt,)
        seen[nxt] = len(path)
        path.append(nxt)
        cur = nxt


def relation_from_leq(elements: Sequence, leq, length) -> GradedRelation:
    """Tabulate a relation from callables ``leq(a, b)`` and ``length(a, b)``."""
    pairs = []
    for a in elements:
        for b in elements:
            if leq(a, b):
                pairs.append((a, b, length(a, b)))
    return GradedRelation.from_pairs(elements, pairs, reflexive=False)
