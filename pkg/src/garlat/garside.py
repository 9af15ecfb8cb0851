"""Germs of Garside structures, normal forms, divisibility and the lattice L_x.

A :class:`Germ` is the finite table of simple morphisms: sources, targets,
lengths, the partial product, Δ and φ.  Everything else is derived from
table lookups:

* the complement ``s*`` with ``s·s* = Δ``;
* the left-divisor meet of two simples with a common source;
* left division ``g \\ t`` (the ``u`` with ``g·u = t``).

Morphisms of the enveloping groupoid are stored in left-weighted normal
form ``s1 … sl Δ^k`` (:class:`Morphism`).  Three conventions drive the
rewriting:

* ``Δ·s = φ⁻¹(s)·Δ``, so ``Δ^k s = φ^{-k}(s) Δ^k``;
* ``s⁻¹ = s*·Δ⁻¹``;
* a junction ``(s, t)`` is left-weighted iff ``s* ∧ t`` is an identity.

>>> B3 = braid_germ(3)
>>> normal_form(B3, "*", "a b a")
Morphism(source='*', factors=(), delta_power=1)
>>> normal_form(B3, "*", "a^-1")
Morphism(source='*', factors=('ba',), delta_power=-1)
"""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

from . import order
from .zaction import ZLattice

DELTA = "Δ"


class GermError(ValueError):
    """A germ table is malformed or a word is not composable."""


@dataclass(frozen=True)
class Morphism:
    source: object
    factors: tuple = ()
    delta_power: int = 0

    @property
    def inf(self) -> int:
        return self.delta_power

    @property
    def sup(self) -> int:
        return self.delta_power + len(self.factors)

    @property
    def positive(self) -> bool:
        return self.delta_power >= 0

    def to_dict(self) -> dict:
        return {"source": str(self.source), "factors": list(self.factors), "delta_power": self.delta_power}

    def __str__(self) -> str:
        parts = list(self.factors)
        if self.delta_power:
            parts.append(f"Δ^{self.delta_power}")
        return "·".join(parts) if parts else f"1_{self.source}"


@dataclass
class Germ:
    """Finite presentation of a homogeneous categorical Garside structure.

    ``product`` only needs the products of non-identity simples; products
    with identities are implicit.
    """

    objects: tuple
    simples: tuple
    source: dict
    target: dict
    length: dict
    product: dict
    delta: dict
    phi_objects: dict
    phi_simples: dict
    name: str = "germ"
    aliases: dict = field(default_factory=dict)

    # -- derived tables --------------------------------------------------

    @cached_property
    def identity(self) -> dict:
        ids = {}
        for s in self.simples:
            if self.length[s] == 0:
                if self.source[s] != self.target[s]:
                    raise GermError(f"zero-length simple {s!r} is not a loop")
                if self.source[s] in ids:
                    raise GermError(f"object {self.source[s]!r} has two identities")
                ids[self.source[s]] = s
        for x in self.objects:
            if x not in ids:
                raise GermError(f"object {x!r} has no identity")
        return ids

    @cached_property
    def _idx(self) -> dict:
        return {s: i for i, s in enumerate(self.simples)}

    @cached_property
    def tables(self) -> _Tables:
        return _Tables(self)

    def mul(self, s, t):
        """Product of two simples, or None when it is not simple."""
        if self.target[s] != self.source[t]:
            return None
        if self.length[s] == 0:
            return t
        if self.length[t] == 0:
            return s
        return self.product.get((s, t))

    def star(self, s):
        return self.simples[self.tables.star[self._idx[s]]]

    def resolve(self, name: str) -> str:
        name = self.aliases.get(name, name)
        if name not in self._idx:
            raise GermError(f"unknown simple {name!r}")
        return name

    def delta_length(self, x) -> int:
        return self.length[self.delta[x]]

    @cached_property
    def _atoms(self) -> tuple:
        composite = {st for (s, t), st in self.product.items() if self.length[s] and self.length[t]}
        return tuple(s for s in self.simples if self.length[s] > 0 and s not in composite)

    def atoms(self, x=None) -> list:
        """Simples that are not products of two non-identity simples."""
        return [s for s in self._atoms if x is None or self.source[s] == x]

    def simples_from(self, x) -> list:
        return [s for s in self.simples if self.source[s] == x]

    # -- file format -----------------------------------------------------

    def to_json(self) -> str:
        data = {
            "name": self.name,
            "objects": [str(x) for x in self.objects],
            "simples": [
                {"name": s, "source": str(self.source[s]), "target": str(self.target[s]), "length": self.length[s]}
                for s in self.simples
            ],
            "product": [[s, t, st] for (s, t), st in sorted(self.product.items(), key=lambda kv: (self._idx[kv[0][0]], self._idx[kv[0][1]]))],
            "delta": {str(x): d for x, d in self.delta.items()},
            "phi": {"objects": {str(a): str(b) for a, b in self.phi_objects.items()}, "simples": dict(self.phi_simples)},
        }
        if self.aliases:
            data["aliases"] = dict(self.aliases)
        return json.dumps(data, indent=1, ensure_ascii=False)

    @classmethod
    def from_json(cls, text: str) -> Germ:
        try:
            data = json.loads(text)
            objects = tuple(str(x) for x in data["objects"])
            simples = tuple(s["name"] for s in data["simples"])
            source = {s["name"]: str(s["source"]) for s in data["simples"]}
            target = {s["name"]: str(s["target"]) for s in data["simples"]}
            length = {s["name"]: int(s["length"]) for s in data["simples"]}
            product = {(a, b): c for a, b, c in data["product"]}
            delta = {str(k): v for k, v in data["delta"].items()}
            phi_o = {str(k): str(v) for k, v in data["phi"]["objects"].items()}
            phi_s = dict(data["phi"]["simples"])
        except (KeyError, TypeError, ValueError) as exc:
            raise GermError(f"bad germ file: {exc}") from None
        return cls(objects, simples, source, target, length, product, delta, phi_o, phi_s,
                   name=data.get("name", "germ"), aliases=data.get("aliases", {}))


class _Tables:
    """Integer-indexed lookup tables used by the normal-form engine."""

    def __init__(self, g: Germ):
        S = len(g.simples)
        idx = g._idx
        self.n = S
        ids = g.identity
        self.src = [g.source[s] for s in g.simples]
        self.tgt = [g.target[s] for s in g.simples]
        self.length = [g.length[s] for s in g.simples]
        self.is_id = [g.length[s] == 0 for s in g.simples]
        self.id_of = {x: idx[s] for x, s in ids.items()}
        self.delta_of = {x: idx[g.delta[x]] for x in g.objects}
        self.is_delta = [False] * S
        for x in g.objects:
            self.is_delta[idx[g.delta[x]]] = True
        self.mul = [[-1] * S for _ in range(S)]
        self.ldiv = [[-1] * S for _ in range(S)]
        for i, s in enumerate(g.simples):
            for j, t in enumerate(g.simples):
                st = g.mul(s, t)
                if st is not None:
                    k = idx[st]
                    self.mul[i][j] = k
                    self.ldiv[i][k] = j
        self.star = [-1] * S
        for i in range(S):
            self.star[i] = self.ldiv[i][self.delta_of[self.src[i]]]
            if self.star[i] < 0:
                raise GermError(f"simple {g.simples[i]!r} has no complement")
        phi = [idx[g.phi_simples[s]] for s in g.simples]
        # powers of phi, reduced modulo its order
        self.phi_pow = [list(range(S))]
        while True:
            nxt = [phi[i] for i in self.phi_pow[-1]]
            if nxt == self.phi_pow[0]:
                break
            self.phi_pow.append(nxt)
            if len(self.phi_pow) > S + 1:
                raise GermError("phi is not a permutation of the simples")
        self.period = len(self.phi_pow)
        ophi = dict(g.phi_objects)
        self.obj_pow = [{x: x for x in g.objects}]
        for _ in range(1, self.period):
            self.obj_pow.append({x: ophi[y] for x, y in self.obj_pow[-1].items()})
        # left divisors and meets
        self.divs = [0] * S
        for i in range(S):
            self.divs[i] |= 1 << i
            self.divs[i] |= 1 << self.id_of[self.src[i]]
        for i in range(S):
            for j in range(S):
                k = self.mul[i][j]
                if k >= 0:
                    self.divs[k] |= 1 << i
        by_mask = {m: i for i, m in enumerate(self.divs)}
        self.meet = [[-1] * S for _ in range(S)]
        for i in range(S):
            for j in range(S):
                if self.src[i] == self.src[j]:
                    self.meet[i][j] = by_mask.get(self.divs[i] & self.divs[j], -1)

    def phi_k(self, k: int) -> list:
        return self.phi_pow[k % self.period]

    def obj_phi_k(self, x, k: int):
        return self.obj_pow[k % self.period][x]


# ---------------------------------------------------------------------------
# built-in germs


def _shortlex_words(gens: Sequence, mul, identity, length):
    """Map each element reachable from ``identity`` to its shortlex-least reduced word."""
    words = {identity: ""}
    level = [identity]
    while level:
        nxt = {}
        for p in sorted(level, key=lambda q: words[q]):
            for name, gnr in gens:
                q = mul(p, gnr)
                if q not in words and q not in nxt and length(q) == length(p) + 1:
                    nxt[q] = words[p] + name
        words.update(nxt)
        level = list(nxt)
    return words


def _perm_mul(p, q):
    return tuple(p[i] for i in q)


def _inversions(p) -> int:
    return sum(1 for i, j in itertools.combinations(range(len(p)), 2) if p[i] > p[j])


def braid_germ(n: int) -> Germ:
    """Germ of the classical Garside structure on the braid group B_n.

    Simples are permutations named by their shortlex reduced word in the
    generators ``a, b, c, …`` (``a`` swaps positions 0 and 1); the
    identity is ``e`` and Δ, the longest permutation, is also ``D``.
    """
    if not 2 <= n <= 8:
        raise GermError("braid_germ supports 2 <= n <= 8")
    ident = tuple(range(n))
    gens = []
    for i in range(n - 1):
        p = list(ident)
        p[i], p[i + 1] = p[i + 1], p[i]
        gens.append((chr(ord("a") + i), tuple(p)))
    words = _shortlex_words(gens, _perm_mul, ident, _inversions)
    words[ident] = "e"
    perms = sorted(words, key=lambda p: (_inversions(p), words[p]))
    names = tuple(words[p] for p in perms)
    w0 = tuple(reversed(ident))
    product = {}
    for p in perms:
        for q in perms:
            if p == ident or q == ident:
                continue
            r = _perm_mul(p, q)
            if _inversions(r) == _inversions(p) + _inversions(q):
                product[(words[p], words[q])] = words[r]
    phi = {words[p]: words[_perm_mul(_perm_mul(w0, p), w0)] for p in perms}
    obj = "*"
    g = Germ(
        objects=(obj,),
        simples=names,
        source={s: obj for s in names},
        target={s: obj for s in names},
        length={words[p]: _inversions(p) for p in perms},
        product=product,
        delta={obj: words[w0]},
        phi_objects={obj: obj},
        phi_simples=phi,
        name=f"braid:{n}",
        aliases={"D": words[w0], "1": "e"},
    )
    g.permutation = {words[p]: p for p in perms}
    return g


_FA_LETTERS = "abcdfghijk"


def free_abelian_germ(n: int) -> Germ:
    """Germ of ℤⁿ: simples are 0/1 vectors, products of disjoint supports."""
    if not 1 <= n <= len(_FA_LETTERS):
        raise GermError(f"free_abelian_germ supports 1 <= n <= {len(_FA_LETTERS)}")
    vecs = sorted(itertools.product((0, 1), repeat=n), key=lambda v: (sum(v), [-c for c in v]))

    def nm(v):
        return "".join(_FA_LETTERS[i] for i in range(n) if v[i]) or "e"

    names = tuple(nm(v) for v in vecs)
    product = {}
    for u in vecs:
        for v in vecs:
            if any(u) and any(v) and not any(a and b for a, b in zip(u, v)):
                product[(nm(u), nm(v))] = nm(tuple(a + b for a, b in zip(u, v)))
    obj = "*"
    full = nm((1,) * n)
    g = Germ(
        objects=(obj,),
        simples=names,
        source={s: obj for s in names},
        target={s: obj for s in names},
        length={nm(v): sum(v) for v in vecs},
        product=product,
        delta={obj: full},
        phi_objects={obj: obj},
        phi_simples={s: s for s in names},
        name=f"free-abelian:{n}",
        aliases={"D": full, "1": "e"},
    )
    g.vector = {nm(v): v for v in vecs}
    return g


# ---------------------------------------------------------------------------
# words and normal forms


def parse_word(germ: Germ, word) -> list:
    """Tokens ``(simple, ±1)`` or ``(DELTA, k)`` from text or a list.

    Text tokens are separated by spaces; ``s^-1``, ``s'`` or ``S`` (upper-case
    single letter) denote inverses, ``D^k`` a power of Δ.
    """
    if isinstance(word, str):
        word = word.split()
    out = []
    for tok in word:
        if isinstance(tok, tuple):
            out.append(tok)
            continue
        exp = 1
        if "^" in tok:
            tok, e = tok.split("^", 1)
            try:
                exp = int(e)
            except ValueError:
                raise GermError(f"bad exponent in {tok}^{e}") from None
        elif tok.endswith("'"):
            tok, exp = tok[:-1], -1
        elif len(tok) == 1 and tok.isupper() and tok not in germ._idx and tok not in germ.aliases and tok.lower() in germ._idx:
            tok, exp = tok.lower(), -1
        if tok in (DELTA, "D") and tok not in germ._idx:
            out.append((DELTA, exp))
            continue
        s = germ.resolve(tok)
        sign = 1 if exp > 0 else -1
        out.extend([(s, sign)] * abs(exp))
    return out


def word_of(f: Morphism) -> list:
    return [(s, 1) for s in f.factors] + ([(DELTA, f.delta_power)] if f.delta_power else [])


def _weight(T: _Tables, P: list, i: int) -> bool:
    """Left-weight the junction ``(P[i], P[i+1])``; True if it changed."""
    s, t = P[i], P[i + 1]
    g = T.meet[T.star[s]][t]
    if g < 0:
        raise GermError("left-divisor meet missing; divisor poset is not a lattice")
    if T.is_id[g]:
        return False
    P[i] = T.mul[s][g]
    P[i + 1] = T.ldiv[g][t]
    if P[i] < 0 or P[i + 1] < 0:
        raise GermError("product table is not closed under left-weighting")
    return True


def _weight_all(T: _Tables, P: list, schedule: str, rng) -> None:
    m = len(P) - 1
    if m <= 0:
        return
    if schedule in ("sweep", "reverse"):
        order_ = range(m) if schedule == "sweep" else range(m - 1, -1, -1)
        changed = True
        while changed:
            changed = False
            for i in order_:
                if _weight(T, P, i):
                    changed = True
    elif schedule == "random":
        dirty = set(range(m))
        while dirty:
            i = rng.choice(sorted(dirty))
            dirty.discard(i)
            if _weight(T, P, i):
                dirty.update(j for j in (i - 1, i + 1) if 0 <= j < m)
    elif schedule == "incremental":
        # re-weight from each position back towards the front
        for end in range(1, m + 1):
            i = end - 1
            while i >= 0 and _weight(T, P, i):
                i -= 1
    else:
        raise ValueError(f"unknown schedule {schedule!r}")


SCHEDULES = ("sweep", "reverse", "random", "incremental")


def _normalise(germ: Germ, source, P: list, k: int, schedule: str = "sweep", rng=None) -> Morphism:
    T = germ.tables
    if rng is None and schedule == "random":
        rng = random.Random(0)
    _weight_all(T, P, schedule, rng)
    j = 0
    while j < len(P) and T.is_delta[P[j]]:
        j += 1
    if j:
        ph = T.phi_k(-j)
        P = [ph[s] for s in P[j:]]
        k += j
    while P and T.is_id[P[-1]]:
        P.pop()
    names = germ.simples
    return Morphism(source, tuple(names[s] for s in P), k)


def normal_form(germ: Germ, source, word, schedule: str = "sweep", rng=None) -> Morphism:
    """Left-weighted normal form of a word in simples and their inverses."""
    T = germ.tables
    idx = germ._idx
    if source not in T.id_of:
        raise GermError(f"unknown object {source!r}")
    P: list[int] = []
    k = 0
    cur = source
    for name, e in parse_word(germ, word):
        if name == DELTA:
            k += e
            cur = T.obj_phi_k(cur, e)
            continue
        s = idx[germ.resolve(name)]
        if e > 0:
            if T.src[s] != cur:
                raise GermError(f"{name} does not start at {cur!r}")
            P.append(T.phi_k(-k)[s])
            cur = T.tgt[s]
        else:
            if T.tgt[s] != cur:
                raise GermError(f"{name}^-1 does not start at {cur!r}")
            P.append(T.phi_k(-k)[T.star[s]])
            k -= 1
            cur = T.src[s]
    return _normalise(germ, source, P, k, schedule, rng)


def target(germ: Germ, f: Morphism):
    T = germ.tables
    o = germ.target[f.factors[-1]] if f.factors else f.source
    return T.obj_phi_k(o, f.delta_power)


def multiply(germ: Germ, f: Morphism, g: Morphism, schedule: str = "incremental") -> Morphism:
    """Normal form of ``f·g``."""
    if target(germ, f) != g.source:
        raise GermError("morphisms are not composable")
    T = germ.tables
    idx = germ._idx
    ph = T.phi_k(-f.delta_power)
    P = [idx[s] for s in f.factors] + [ph[idx[s]] for s in g.factors]
    return _normalise(germ, f.source, P, f.delta_power + g.delta_power, schedule)


def inverse(germ: Germ, f: Morphism) -> Morphism:
    """``f⁻¹ = Δ^{-k} s_l⁻¹ … s_1⁻¹``."""
    tgt = target(germ, f)
    word = [(DELTA, -f.delta_power)] if f.delta_power else []
    word += [(s, -1) for s in reversed(f.factors)]
    return normal_form(germ, tgt, word, schedule="incremental")


def identity(germ: Germ, x) -> Morphism:
    return Morphism(x, (), 0)


def simple_morphism(germ: Germ, s: str) -> Morphism:
    s = germ.resolve(s)
    return normal_form(germ, germ.source[s], [(s, 1)])


def grade(germ: Germ, f: Morphism) -> int:
    """Length of ``f``: sum of factor lengths plus ``k`` copies of ``ℓ(Δ)``."""
    o = germ.target[f.factors[-1]] if f.factors else f.source
    return sum(germ.length[s] for s in f.factors) + f.delta_power * germ.delta_length(o)


def is_left_weighted(germ: Germ, f: Morphism) -> bool:
    T = germ.tables
    P = [germ._idx[s] for s in f.factors]
    if any(T.is_id[s] or T.is_delta[s] for s in P):
        return False
    return all(T.is_id[T.meet[T.star[P[i]]][P[i + 1]]] for i in range(len(P) - 1))


def divides(germ: Germ, f: Morphism, g: Morphism) -> bool:
    """``f ⪯ g``: ``f⁻¹g`` is positive."""
    return multiply(germ, inverse(germ, f), g).positive


def head(germ: Germ, f: Morphism) -> str:
    """Largest simple left divisor of a positive morphism."""
    if f.delta_power > 0:
        return germ.delta[f.source]
    if f.factors:
        return f.factors[0]
    return germ.identity[f.source]


def _require_positive(*fs):
    for f in fs:
        if not f.positive:
            raise GermError(f"{f} is not positive")


def left_gcd(germ: Germ, f: Morphism, g: Morphism, method: str = "saturation") -> Morphism:
    """Greatest common left divisor of two positive morphisms.

    ``saturation`` grows a common divisor one atom at a time until no atom
    extends it; in a lattice the maximal common divisor is the greatest.
    ``head`` peels ``head(f) ∧ head(g)`` repeatedly.
    """
    _require_positive(f, g)
    if f.source != g.source:
        raise GermError("different sources")
    h = identity(germ, f.source)
    if method == "head":
        T = germ.tables
        idx = germ._idx
        while True:
            a = T.meet[idx[head(germ, f)]][idx[head(germ, g)]]
            if T.is_id[a]:
                return h
            s = germ.simples[a]
            si = inverse(germ, simple_morphism(germ, s))
            h = multiply(germ, h, simple_morphism(germ, s))
            f, g = multiply(germ, si, f), multiply(germ, si, g)
    if method != "saturation":
        raise ValueError(f"unknown method {method!r}")
    while True:
        x = target(germ, h)
        for a in germ.atoms(x):
            ha = multiply(germ, h, simple_morphism(germ, a))
            if divides(germ, ha, f) and divides(germ, ha, g):
                h = ha
                break
        else:
            return h


def left_lcm(germ: Germ, f: Morphism, g: Morphism) -> Morphism:
    """Least common right multiple of two positive morphisms.

    Starts from the common multiple ``Δ^N`` and strips trailing atoms while
    both arguments still divide.
    """
    _require_positive(f, g)
    if f.source != g.source:
        raise GermError("different sources")
    m = Morphism(f.source, (), max(f.sup, g.sup))
    while True:
        x = target(germ, m)
        for a in germ.atoms():
            if germ.target[a] != x:
                continue
            ma = multiply(germ, m, inverse(germ, simple_morphism(germ, a)))
            if divides(germ, f, ma) and divides(germ, g, ma):
                m = ma
                break
        else:
            return m


def left_divisors(germ: Germ, f: Morphism) -> list:
    """All positive left divisors of a positive morphism (exhaustive)."""
    _require_positive(f)
    out = {identity(germ, f.source)}
    frontier = list(out)
    while frontier:
        nxt = []
        for h in frontier:
            for a in germ.atoms(target(germ, h)):
                ha = multiply(germ, h, simple_morphism(germ, a))
                if ha not in out and divides(germ, ha, f):
                    out.add(ha)
                    nxt.append(ha)
        frontier = nxt
    return sorted(out, key=lambda m: (grade(germ, m), str(m)))


# ---------------------------------------------------------------------------
# the Garside lattice L_x


class GarsideLattice(ZLattice):
    """Morphisms from a base object, ordered by left divisibility, with ``f + 1 = fΔ``."""

    def __init__(self, germ: Germ, base=None):
        self.germ = germ
        self.base = germ.objects[0] if base is None else base
        self.name = f"{germ.name}@{self.base}"

    def base_point(self):
        return identity(self.germ, self.base)

    def point(self, word) -> Morphism:
        return normal_form(self.germ, self.base, word)

    def quotient(self, f: Morphism, g: Morphism) -> Morphism:
        return multiply(self.germ, inverse(self.germ, f), g)

    def leq(self, f, g):
        return self.quotient(f, g).positive

    def min_shift(self, f, g):
        return -self.quotient(f, g).inf

    def gaps(self, f, g):
        # inf(h⁻¹) = -sup(h)
        h = self.quotient(f, g)
        return -h.inf, h.sup

    def _translate(self, f, g):
        j = min(f.inf, g.inf)
        D = Morphism(self.base, (), j)
        Di = Morphism(self.base, (), -j)
        return D, multiply(self.germ, Di, f), multiply(self.germ, Di, g)

    def meet(self, f, g):
        D, a, b = self._translate(f, g)
        return multiply(self.germ, D, left_gcd(self.germ, a, b, method="head"))

    def join(self, f, g):
        D, a, b = self._translate(f, g)
        return multiply(self.germ, D, left_lcm(self.germ, a, b))

    def shift(self, f, k):
        return Morphism(f.source, f.factors, f.delta_power + k)

    def grade(self, f) -> int:
        return grade(self.germ, f)

    def grade_gap(self, f, g):
        return grade(self.germ, g) - grade(self.germ, f)

    def cofinality_bound(self, f, g):
        return max(0, -self.quotient(f, g).inf, -self.quotient(g, f).inf)

    def unit_interval(self, f):
        x = target(self.germ, f)
        return [multiply(self.germ, f, simple_morphism(self.germ, s)) if self.germ.length[s] else f
                for s in self.germ.simples_from(x)]

    def orbit_key(self, f):
        return (f.source, f.factors)

    def key(self, f):
        return f


def lx_leq(germ: Germ, f: Morphism, g: Morphism) -> bool:
    return GarsideLattice(germ, f.source).leq(f, g)


def lx_meet(germ: Germ, f: Morphism, g: Morphism) -> Morphism:
    return GarsideLattice(germ, f.source).meet(f, g)


def lx_join(germ: Germ, f: Morphism, g: Morphism) -> Morphism:
    return GarsideLattice(germ, f.source).join(f, g)


def psi(germ: Germ, f: Morphism, k: int = 1) -> Morphism:
    """``ψ^k(f) = f Δ^k``."""
    return Morphism(f.source, f.factors, f.delta_power + k)


def weak_cayley_ball(germ: Germ, base=None, radius: int = 1, cap: int = 200_000):
    from .zaction import build_lattice_ball

    L = GarsideLattice(germ, base)
    return build_lattice_ball(L, L.base_point(), radius, cap)


def delta_quotient_ball(germ: Germ, base=None, radius: int = 1, cap: int = 200_000):
    from .zaction import build_quotient_ball

    L = GarsideLattice(germ, base)
    return build_quotient_ball(L, L.base_point(), radius, cap)


# ---------------------------------------------------------------------------
# axiom checks


@dataclass
class GermReport:
    checks: dict = field(default_factory=dict)
    bound: int = 0

    def record(self, name: str, ok: bool, witness=None) -> None:
        prev = self.checks.get(name)
        if prev is not None and not prev["ok"]:
            return
        self.checks[name] = {"ok": bool(ok), "witness": None if ok else _plain(witness)}

    def fail(self, name: str, witness) -> None:
        self.record(name, False, witness)

    @property
    def ok(self) -> bool:
        return all(c["ok"] for c in self.checks.values())

    def failures(self) -> dict:
        return {k: v["witness"] for k, v in self.checks.items() if not v["ok"]}

    def to_dict(self) -> dict:
        return {"ok": self.ok, "cancellativity_bound": self.bound, "checks": self.checks}


def _plain(w):
    if isinstance(w, (list, tuple)):
        return [_plain(x) for x in w]
    return w if isinstance(w, (int, str, type(None))) else str(w)


def check_germ(g: Germ, bound: int | None = None) -> GermReport:
    """Check the germ axioms; every failure names a concrete witness.

    Cancellativity is checked on all products in the table, which covers
    every product of total length up to ``ℓ(Δ)``; ``bound`` is recorded.
    """
    rep = GermReport()
    names = set(g.simples)
    # identities
    ids = {}
    ok = True
    for s in g.simples:
        if g.length.get(s, 0) == 0:
            if g.source.get(s) != g.target.get(s) or g.source.get(s) in ids:
                rep.fail("identities", [s])
                ok = False
            ids[g.source.get(s)] = s
    for x in g.objects:
        if x not in ids:
            rep.fail("identities", [x])
            ok = False
    rep.record("identities", ok)
    if not ok:
        return rep
    dmax = max((g.length.get(d, 0) for d in g.delta.values()), default=0)
    rep.bound = dmax if bound is None else bound
    # homogeneity and table consistency
    for s in g.simples:
        if g.length[s] < 0 or g.source[s] not in g.objects or g.target[s] not in g.objects:
            rep.fail("homogeneity", [s])
    for (s, t), st in g.product.items():
        if s not in names or t not in names or st not in names:
            rep.fail("homogeneity", [s, t, st])
            continue
        if g.length[st] != g.length[s] + g.length[t]:
            rep.fail("homogeneity", [s, t, st])
        if g.target[s] != g.source[t] or g.source[st] != g.source[s] or g.target[st] != g.target[t]:
            rep.fail("homogeneity", [s, t, st])
    rep.record("homogeneity", True)
    if not rep.ok:
        return rep
    # Δ
    for x in g.objects:
        d = g.delta.get(x)
        if d not in names or g.source[d] != x or g.target[d] != g.phi_objects.get(x):
            rep.fail("delta", [x, d])
    rep.record("delta", True)
    # phi automorphism
    po, ps = g.phi_objects, g.phi_simples
    if sorted(map(str, po.values())) != sorted(map(str, g.objects)) or set(po) != set(g.objects):
        rep.fail("phi_automorphism", ["objects"])
    if set(ps) != names or set(ps.values()) != names:
        rep.fail("phi_automorphism", ["simples"])
    else:
        for s in g.simples:
            f = ps[s]
            if g.length[f] != g.length[s] or g.source[f] != po.get(g.source[s]) or g.target[f] != po.get(g.target[s]):
                rep.fail("phi_automorphism", [s, f])
        for (s, t), st in g.product.items():
            if g.mul(ps[s], ps[t]) != ps[st]:
                rep.fail("phi_automorphism", [s, t, st])
        for x in g.objects:
            if x in po and ps.get(g.delta[x]) != g.delta.get(po[x]):
                rep.fail("phi_automorphism", [g.delta[x]])
    rep.record("phi_automorphism", True)
    # associativity: (st)u defined iff s(tu) defined, and then equal
    for s, t in list(g.product):
        st = g.product[(s, t)]
        for u in g.simples:
            if g.length[u] == 0 or g.source[u] != g.target[t]:
                continue
            tu = g.mul(t, u)
            left = g.mul(st, u)
            right = g.mul(s, tu) if tu is not None else None
            if tu is None:
                if left is not None:
                    rep.fail("associativity", [s, t, u])
            elif left != right:
                rep.fail("associativity", [s, t, u])
    rep.record("associativity", True)
    # cancellativity on the table
    seen_l, seen_r = {}, {}
    for (s, t), st in g.product.items():
        a = seen_l.setdefault((s, st), t)
        if a != t:
            rep.fail("cancellativity", [s, a, t, st])
        b = seen_r.setdefault((t, st), s)
        if b != s:
            rep.fail("cancellativity", [b, s, t, st])
    rep.record("cancellativity", True)
    # complements
    stars = {}
    for s in g.simples:
        d = g.delta[g.source[s]]
        c = [u for u in g.simples if g.mul(s, u) == d]
        if len(c) != 1:
            rep.fail("complement", [s])
        else:
            stars[s] = c[0]
    rep.record("complement", True)
    if rep.checks["complement"]["ok"]:
        for x in g.objects:
            dom = [s for s in g.simples if g.source[s] == x]
            cod = {s for s in g.simples if g.target[s] == po.get(x)}
            img = [stars[s] for s in dom]
            if len(set(img)) != len(img):
                dup = next(a for a, b in itertools.combinations(dom, 2) if stars[a] == stars[b])
                rep.fail("complement_bijection", [x, dup])
            missing = sorted(cod - set(img))
            if missing:
                rep.fail("complement_bijection", [x, missing[0]])
        rep.record("complement_bijection", True)
        for s in g.simples:
            if g.mul(stars[s], ps.get(s, s)) != g.delta[g.target[s]]:
                rep.fail("naturality", [s, stars[s]])
        rep.record("naturality", True)
    # atoms are simple: every simple of length >= 2 factors nontrivially
    composite = {st for (s, t), st in g.product.items() if g.length[s] and g.length[t]}
    for s in g.simples:
        if g.length[s] >= 2 and s not in composite:
            rep.fail("atoms_simple", [s])
    rep.record("atoms_simple", True)
    # divisor posets of Δ are lattices
    for x in g.objects:
        for side in ("left", "right"):
            r = _divisor_relation(g, x, side)
            lr = order.is_lattice(r)
            if not lr.is_lattice:
                rep.fail("divisor_lattice", [x, side, list(lr.failing_pair), lr.missing])
    rep.record("divisor_lattice", True)
    return rep


def _divisor_relation(g: Germ, x, side: str) -> order.GradedRelation:
    """Left (or right) divisibility among the simple divisors of ``Δ_x``."""
    if side == "left":
        els = [s for s in g.simples if g.source[s] == x]
    else:
        y = g.phi_objects[x]
        els = [s for s in g.simples if g.target[s] == y]
    pairs = []
    for a in els:
        for b in els:
            if side == "left":
                ok = a == b or any(g.mul(a, u) == b for u in g.simples)
            else:
                ok = a == b or any(g.mul(u, a) == b for u in g.simples)
            if ok:
                pairs.append((a, b, g.length[b] - g.length[a]))
    return order.GradedRelation.from_pairs(els, pairs, reflexive=False)


def divisor_relation(g: Germ, x=None, side: str = "left") -> order.GradedRelation:
    return _divisor_relation(g, g.objects[0] if x is None else x, side)


# ---------------------------------------------------------------------------
# germ mutations for fault injection


def mutate(g: Germ, kind: str, target_simple: str | None = None) -> Germ:
    """A damaged copy: ``delete`` a simple, ``length`` off by one, or ``product`` rewired."""
    import copy

    h = copy.deepcopy(g)
    h.__dict__.pop("tables", None)
    h.__dict__.pop("_idx", None)
    h.__dict__.pop("identity", None)
    h.__dict__.pop("_atoms", None)
    nontriv = [s for s in g.simples if g.length[s] > 0 and s not in g.delta.values()]
    s = target_simple or next(t for t in nontriv if g.length[t] >= 2)
    if kind == "delete":
        h.simples = tuple(t for t in g.simples if t != s)
        for d in (h.source, h.target, h.length):
            d.pop(s, None)
        h.product = {k: v for k, v in g.product.items() if s not in k and v != s}
        h.phi_simples = {a: b for a, b in g.phi_simples.items() if a != s and b != s}
    elif kind == "length":
        h.length[s] += 1
    elif kind == "product":
        # send the first product of two atoms to a different simple of the same length
        (a, b), st = next(((k, v) for k, v in sorted(g.product.items()) if g.length[k[0]] == g.length[k[1]] == 1))
        other = next(t for t in g.simples if t != st and g.length[t] == g.length[st] and g.source[t] == g.source[st])
        h.product[(a, b)] = other
    else:
        raise ValueError(f"unknown mutation {kind!r}")
    return h


def load_germ(spec: str) -> Germ:
    """``braid:n``, ``free-abelian:n`` (or ``zn:n``), ``subspace:n:q`` or a JSON path."""
    parts = spec.split(":")
    kind = parts[0]
    try:
        if kind == "braid":
            return braid_germ(int(parts[1]))
        if kind in ("free-abelian", "zn"):
            return free_abelian_germ(int(parts[1]))
        if kind == "subspace":
            from .building import subspace_germ

            return subspace_germ(int(parts[1]), int(parts[2]))
    except (IndexError, ValueError) as exc:
        raise GermError(f"bad germ spec {spec!r}: {exc}") from None
    with open(spec, encoding="utf-8") as fh:
        return Germ.from_json(fh.read())
