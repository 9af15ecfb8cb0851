from __future__ import annotations

import networkx as nx
import pytest

from garlat.building import NormLattice
from garlat.dictionary import (
    CONVENTION,
    DictionaryError,
    FlagComplex,
    a2_to_z3,
    check_flag,
    coxeter_a2_ball,
    flag_embeds,
    flag_to_weak_order,
    germ_to_special,
    interval_digraph,
    lattice_to_flag,
    lattice_window,
    roundtrip,
    subspace_digraph,
    typed_a2_to_flag,
)
from garlat.garside import GarsideLattice, braid_germ, free_abelian_germ
from garlat.graph import ParseError
from garlat.order import check_weak_order
from garlat.zaction import ZnLattice


@pytest.fixture(scope="module")
def z2_flag():
    w = lattice_window(ZnLattice(2), radius=2)
    return w, lattice_to_flag(w)


def test_z2_window_flag(z2_flag):
    w, F = z2_flag
    assert len(F.vertices) == 19 and len(F.edges) == 42
    rep = check_flag(F)
    assert rep.ok and rep.convention == CONVENTION


def test_interval_of_z2_is_square(z2_flag):
    _, F = z2_flag
    a = next(iter(F.interior))
    iv = F.interval(a)
    assert len(iv) == 4 and iv[0] == a and iv[-1] == F.phi[a]
    assert nx.is_isomorphic(interval_digraph(F, a), nx.DiGraph([(0, 1), (0, 2), (1, 3), (2, 3)]))


def test_fault_injection_names_a_triangle(z2_flag):
    _, F = z2_flag
    for edge in sorted(F.edges)[:10]:
        bad = F.with_label(edge, F.edges[edge] + 1)
        rep = check_flag(bad)
        assert not rep.ok
        w = rep.failures()["length_additivity"]
        tri = w["triangle"]
        names = {str(v).replace(" ", "") for v in edge}
        assert names <= set(tri)


def test_missing_edge_breaks_phi_condition(z2_flag):
    _, F = z2_flag
    a = next(iter(sorted(F.interior)))
    b = next(iter(F.out(a) - {F.phi[a]}))
    edges = {k: v for k, v in F.edges.items() if k != (a, b)}
    G = FlagComplex(F.vertices, edges, F.phi, F.interior, F.radius)
    assert not check_flag(G).ok


def test_cyclic_triangle_is_not_flag():
    F = FlagComplex(("a", "b", "c"), {("a", "b"): 1, ("b", "c"): 1, ("c", "a"): 1}, {}, frozenset("abc"))
    assert "flagness" in check_flag(F).failures()


def test_weak_order_from_flag(z2_flag):
    _, F = z2_flag
    res = flag_to_weak_order(F)
    assert check_weak_order(res.relation).is_weak_order
    assert res.report["convention"] == CONVENTION


@pytest.mark.parametrize(
    "L,radius",
    [(ZnLattice(2), 3), (GarsideLattice(braid_germ(3)), 3), (GarsideLattice(free_abelian_germ(3)), 2)],
    ids=["z2", "b3", "fa3"],
)
def test_roundtrip(L, radius):
    rt = roundtrip(lattice_window(L, radius=radius))
    assert rt.ok and rt.certified > 0


def test_roundtrip_z2_counts():
    rt = roundtrip(lattice_window(ZnLattice(2), radius=3))
    assert (rt.pairs, rt.certified) == (1369, 564)


def test_json_round_trip(z2_flag, tmp_path):
    _, F = z2_flag
    G = FlagComplex.from_json(F.to_json())
    assert len(G.edges) == len(F.edges) and len(G.interior) == len(F.interior)
    assert check_flag(G).ok
    assert G.to_json() == FlagComplex.from_json(G.to_json()).to_json()


def test_json_errors():
    with pytest.raises(ParseError):
        FlagComplex.from_json("[]")
    with pytest.raises(ParseError):
        FlagComplex.from_json('{"vertices": ["a"], "edges": [["a", "z", 1]]}')


def test_germ_to_special():
    assert len(germ_to_special(free_abelian_germ(2), radius=2).keys) == 19
    assert len(germ_to_special(braid_germ(3), radius=2).keys) == 45


def test_germ_to_special_rejects_flat_germ():
    with pytest.raises(DictionaryError):
        germ_to_special(free_abelian_germ(1).__class__(
            objects=("*",), simples=("e",), source={"e": "*"}, target={"e": "*"}, length={"e": 0},
            product={}, delta={"*": "e"}, phi_objects={"*": "*"}, phi_simples={"e": "e"},
        ))


def test_typed_a2_embeds_in_z3():
    ball, tau = coxeter_a2_ball(3)
    F = typed_a2_to_flag(ball, tau, (-3, 5))
    assert len(F.vertices) == 111 and len(F.edges) == 524 and len(F.interior) == 19
    assert check_flag(F).ok
    G = lattice_to_flag(lattice_window(ZnLattice(3), radius=6))
    assert flag_embeds(F, G, a2_to_z3) == []


def test_typed_a2_rejects_bad_typing():
    ball, tau = coxeter_a2_ball(1)
    bad = {k: 0 for k in tau}
    with pytest.raises(DictionaryError):
        typed_a2_to_flag(ball, bad, (0, 3))


def test_norm_lattice_intervals_are_subspace_lattices():
    w = lattice_window(NormLattice(3, 2), radius=2)
    F = lattice_to_flag(w)
    assert check_flag(F).ok
    ref = subspace_digraph(3, 2)
    for a in F.interior:
        assert nx.is_isomorphic(interval_digraph(F, a), ref)
