from __future__ import annotations

import itertools
import json

import networkx as nx
import numpy as np
import pytest

from garlat.graph import BallGraph, FiniteGraph
from garlat.wmcheck import (
    FAIL,
    INCONCLUSIVE,
    PASS,
    check_local_weak_modularity,
    check_QC,
    check_strong_conditions,
    check_TC,
    check_weak_modularity,
    complete_bipartite,
    complete_graph,
    cycle_graph,
    hypercube,
    path_graph,
    replay,
)


def naive(G: nx.Graph):
    """Literal quantifier check: {(x, n, cond): holds} for a connected graph."""
    d = dict(nx.all_pairs_shortest_path_length(G))
    out = {}
    for x in G:
        top = max(d[x].values())
        for n in range(2, top + 1):
            tc = qc = True
            sphere = [v for v in G if d[x][v] == n]
            for y, z in itertools.combinations(sphere, 2):
                back = any(d[x][w] == n - 1 for w in set(G[y]) & set(G[z]))
                if G.has_edge(y, z) and not back:
                    tc = False
                if d[y][z] == 2 and not back:
                    if any(d[x][t] == n + 1 for t in set(G[y]) & set(G[z])):
                        qc = False
            out[(x, n, "TC")] = tc
            out[(x, n, "QC")] = qc
    return out


def verdict_map(g: FiniteGraph):
    v = check_weak_modularity(g, with_census=False)
    return {(g.labels[g.vertex(o.basepoint)], o.n, o.condition): o.status == PASS for o in v.outcomes}


def small_graphs():
    rng = np.random.default_rng(7)
    for n in range(3, 13):
        for _ in range(6):
            G = nx.gnp_random_graph(n, float(rng.uniform(0.2, 0.6)), seed=int(rng.integers(1 << 30)))
            if nx.is_connected(G):
                yield G
    yield nx.petersen_graph()
    yield nx.cycle_graph(7)
    yield nx.wheel_graph(7)
    yield nx.grid_2d_graph(3, 4)


def test_matches_naive_reference():
    count = 0
    for G in small_graphs():
        g = FiniteGraph.from_edges(G.nodes, G.edges)
        assert verdict_map(g) == naive(G)
        count += 1
    assert count > 20


def test_both_backends_match_reference():
    for G in list(small_graphs())[:15]:
        g = FiniteGraph.from_edges(G.nodes, G.edges)
        a = check_weak_modularity(g, use_numba=True, with_census=False).to_dict()
        b = check_weak_modularity(g, use_numba=False, with_census=False).to_dict()
        assert a == b


def test_relabel_invariance():
    for G in list(small_graphs())[:20]:
        g = FiniteGraph.from_edges(G.nodes, G.edges)
        perm = np.random.default_rng(len(g)).permutation(len(g))
        h = g.relabel(perm)
        assert verdict_map(g) == verdict_map(h)


def test_fixture_verdicts():
    assert not check_local_weak_modularity(cycle_graph(5)).ok
    assert check_local_weak_modularity(hypercube(3)).ok
    assert check_local_weak_modularity(complete_bipartite(2, 3)).ok
    assert check_weak_modularity(complete_graph(5)).ok
    assert check_weak_modularity(path_graph(6)).ok


def test_c5_tc_counterexample():
    o = check_TC(cycle_graph(5), 0, 2)
    assert o.status == FAIL and o.counterexample == (0, 2, 3)


def test_c6_tc_vacuous_qc_fails():
    g = cycle_graph(6)
    tc = check_TC(g, 0, 2)
    assert tc.status == PASS and tc.instances == 0
    qc = check_QC(g, 0, 2)
    assert qc.status == FAIL and qc.counterexample == (0, 2, 4, 3)


def test_census():
    v = check_local_weak_modularity(hypercube(3))
    assert (v.triangles, v.squares) == (0, 6)
    v = check_local_weak_modularity(complete_graph(4))
    assert (v.triangles, v.squares) == (4, 0)


def test_replay_round_trip():
    g = cycle_graph(6)
    v = check_weak_modularity(g)
    fails = json.loads(json.dumps(v.to_dict()))["outcomes"]
    fails = [o for o in fails if o["status"] == FAIL]
    assert len(fails) == 6 and all(replay(o, g) for o in fails)
    chord = FiniteGraph.from_edges(range(6), [(i, (i + 1) % 6) for i in range(6)] + [(1, 4)])
    qc = next(o for o in fails if o["condition"] == "QC" and o["counterexample"][0] == "0")
    assert not replay(qc, chord)


def test_ball_inconclusive_near_boundary():
    G = nx.grid_2d_graph(9, 9)
    g = FiniteGraph.from_edges(G.nodes, G.edges)
    b = BallGraph.from_graph(g, g.vertex((4, 4)), 8)
    # margin 8 at the centre, 0 at a corner
    corner = b.vertex((0, 0))
    outs = check_weak_modularity(b, basepoints=[corner], with_census=False).outcomes
    assert {o.status for o in outs} == {INCONCLUSIVE}


def test_strong_conditions():
    assert all(o.status == PASS for o in check_strong_conditions(complete_bipartite(2, 3), 0))
    # the cube is weakly modular but its three neighbours of the antipode are pairwise non-adjacent
    sqc = [o for o in check_strong_conditions(hypercube(3), 0) if o.status == FAIL]
    assert [(o.condition, o.n, o.counterexample) for o in sqc] == [("SQC", 2, (0, 7, 3, 5, 6))]
    assert replay(sqc[0].to_dict(), hypercube(3))
    outs = check_strong_conditions(cycle_graph(5), 0)
    assert any(o.condition == "STC" and o.status == FAIL for o in outs)
    bad = next(o for o in outs if o.status == FAIL)
    assert replay(bad.to_dict(), cycle_graph(5))


def test_bad_arguments():
    with pytest.raises(ValueError):
        check_TC(cycle_graph(5), 0, 1)
    with pytest.raises(KeyError):
        check_TC(cycle_graph(5), "zz", 2)


def test_table_and_json_are_stable():
    v = check_local_weak_modularity(cycle_graph(5))
    assert json.dumps(v.to_dict(), sort_keys=True) == json.dumps(check_local_weak_modularity(cycle_graph(5)).to_dict(), sort_keys=True)
    assert v.table().splitlines()[0].split()[:2] == ["basepoint", "cond"]
