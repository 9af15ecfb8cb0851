from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from garlat.garside import braid_germ, divisor_relation
from garlat.order import (
    CycleReport,
    GradedRelation,
    OrderError,
    Poset,
    check_weak_order,
    generate_order_t,
    is_lattice,
    join,
    meet,
    relation_from_leq,
)


def boolean_lattice(k: int) -> GradedRelation:
    els = list(itertools.product((0, 1), repeat=k))
    return relation_from_leq(
        els, lambda a, b: all(x <= y for x, y in zip(a, b)), lambda a, b: sum(b) - sum(a)
    )


def bowtie() -> GradedRelation:
    lo, mid, hi = ["p", "q"], ["m1", "m2"], ["M1", "M2"]
    pairs = [(a, b, 1) for a in lo for b in mid] + [(a, b, 1) for a in mid for b in hi]
    pairs += [(a, b, 2) for a in lo for b in hi]
    return GradedRelation.from_pairs(lo + mid + hi, pairs)


# -- check_weak_order ----------------------------------------------------------


def test_chain_passes():
    r = GradedRelation.from_pairs("abc", [("a", "b", 1), ("b", "c", 1), ("a", "c", 2)])
    rep = check_weak_order(r)
    assert rep.ok and rep.is_poset


def test_condition_star_violation_named():
    r = GradedRelation.from_pairs(
        "abcd", [("a", "b", 1), ("b", "c", 1), ("c", "d", 1), ("b", "d", 2), ("a", "d", 3)]
    )
    rep = check_weak_order(r)
    assert not rep.condition_star
    assert rep.failures["condition_star"] == ("a", "b", "c", "d")


def test_homogeneity_failure():
    r = GradedRelation.from_pairs("abc", [("a", "b", 1), ("b", "c", 1), ("a", "c", 3)])
    rep = check_weak_order(r)
    assert not rep.homogeneous and rep.condition_star
    assert rep.failures["homogeneous"] == ("a", "b", "c")


def test_antisymmetry_failure():
    r = GradedRelation.from_pairs("ab", [("a", "b", 1), ("b", "a", 1)])
    assert not check_weak_order(r).antisymmetric


def test_missing_reflexive_pair():
    r = GradedRelation.from_pairs("ab", [("a", "b", 1)], reflexive=False)
    assert check_weak_order(r).failures["reflexive"] == ("a",)


@given(st.integers(1, 4))
def test_genuine_posets_pass(k):
    assert check_weak_order(boolean_lattice(k)).ok


# -- meets, joins, lattices ----------------------------------------------------


def test_boolean_meet():
    p = boolean_lattice(2)
    assert meet(p, (1, 0), (0, 1)) == (0, 0)
    assert join(p, (1, 0), (0, 1)) == (1, 1)


def test_missing_join():
    p = GradedRelation.from_pairs(["bot", "x", "y"], [("bot", "x", 1), ("bot", "y", 1)])
    assert join(p, "x", "y") is None
    assert meet(p, "x", "y") == "bot"


def test_unknown_element():
    with pytest.raises((KeyError, OrderError)):
        meet(boolean_lattice(1), (0,), (5,))


def test_boolean_cube_is_lattice():
    assert is_lattice(boolean_lattice(3)).is_lattice


def test_bowtie_not_lattice():
    rep = is_lattice(bowtie())
    assert not rep.is_lattice
    assert set(rep.failing_pair) in ({"p", "q"}, {"m1", "m2"}, {"M1", "M2"})


def test_bowtie_middle_pair_has_no_join():
    p = bowtie()
    assert join(p, "m1", "m2") is None and meet(p, "m1", "m2") is None


def test_braid_divisor_lattices():
    b3 = divisor_relation(braid_germ(3))
    assert meet(b3, "ab", "ba") == "e"
    b4 = divisor_relation(braid_germ(4))
    assert len(b4.elements) == 24
    assert is_lattice(b4).is_lattice


def _universal(p: GradedRelation):
    els = p.elements
    for a, b in itertools.combinations(els, 2):
        m = meet(p, a, b)
        lower = [c for c in els if p.leq(c, a) and p.leq(c, b)]
        if m is None:
            assert not lower or all(any(not p.leq(c, d) for d in lower) for c in lower)
        else:
            assert all(p.leq(c, m) for c in lower)
        j = join(p, a, b)
        upper = [c for c in els if p.leq(a, c) and p.leq(b, c)]
        if j is not None:
            assert all(p.leq(j, c) for c in upper)


def test_universal_property_on_fixtures():
    for p in (boolean_lattice(3), bowtie(), divisor_relation(braid_germ(3))):
        _universal(p)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 6), st.integers(0, 6)), max_size=14))
def test_random_posets(pairs):
    # the order generated by a random DAG on 7 points, graded by depth differences when possible
    edges = {(a, b) for a, b in pairs if a < b}
    els = list(range(7))
    reach = {a: {a} for a in els}
    for a in reversed(els):
        for x, y in edges:
            if x == a:
                reach[a] |= reach[y]
    p = GradedRelation.from_pairs(els, [(a, b, b - a) for a in els for b in reach[a] if b != a])
    assert check_weak_order(p).is_poset
    _universal(p)
    q = Poset(p)
    for a, b in itertools.combinations(els, 2):
        assert q.meet(a, b) == meet(p, a, b)
        assert q.join(a, b) == join(p, a, b)


# -- generated order -----------------------------------------------------------


def _z2_window():
    els = [(i, j) for i in range(4) for j in range(4)]
    pairs = []
    for a in els:
        for b in els:
            d = (b[0] - a[0], b[1] - a[1])
            if a != b and 0 <= d[0] <= 1 and 0 <= d[1] <= 1:
                pairs.append((a, b, sum(d)))
    return els, GradedRelation.from_pairs(els, pairs)


def test_generated_order_is_product_order():
    els, w = _z2_window()
    assert check_weak_order(w).is_weak_order
    phi = {a: (a[0] + 1, a[1] + 1) for a in els if a[0] < 3 and a[1] < 3}
    t = generate_order_t(w, phi)
    for a in els:
        for b in els:
            prod = a[0] <= b[0] and a[1] <= b[1]
            assert t.leq(a, b) == prod
            if prod:
                assert t.length(a, b) == (b[0] - a[0]) + (b[1] - a[1])
    assert check_weak_order(t).is_poset and check_weak_order(t).homogeneous


def test_generated_order_restricts_to_interval():
    els, w = _z2_window()
    t = generate_order_t(w)
    iv = [(1, 1), (1, 2), (2, 1), (2, 2)]
    assert {(a, b) for a in iv for b in iv if t.leq(a, b)} == {(a, b) for a in iv for b in iv if w.leq(a, b)}


def test_generated_order_rejects_antisymmetry():
    w = GradedRelation.from_pairs("ab", [("a", "b", 1), ("b", "a", 1)])
    with pytest.raises(OrderError):
        generate_order_t(w)


def test_generated_order_cycle_report():
    w = GradedRelation.from_pairs("abc", [("a", "b", 1), ("b", "c", 1), ("c", "a", 1)])
    rep = generate_order_t(w)
    assert isinstance(rep, CycleReport)
    assert rep.cycle[0] == rep.cycle[-1] and len(rep.cycle) == 4


def test_generated_order_inconsistent_lengths():
    w = GradedRelation.from_pairs("abcd", [("a", "b", 1), ("b", "d", 1), ("a", "c", 1), ("c", "d", 2)])
    with pytest.raises(OrderError, match="lengths"):
        generate_order_t(w)


def test_single_element():
    w = GradedRelation.from_pairs(["x"], [])
    t = generate_order_t(w, {"x": "x"})
    assert t.leq("x", "x") and t.length("x", "x") == 0


def test_phi_must_preserve():
    w = GradedRelation.from_pairs("abc", [("a", "b", 1)])
    with pytest.raises(OrderError):
        generate_order_t(w, {"a": "b", "b": "c"})


def test_json_round_trip():
    r = bowtie()
    s = GradedRelation.from_json(r.to_json())
    assert s.elements == r.elements and dict(s.lengths) == dict(r.lengths)


def test_json_requires_lengths():
    with pytest.raises(OrderError):
        GradedRelation.from_json('{"elements": ["a", "b"], "pairs": [["a", "b"]]}')
