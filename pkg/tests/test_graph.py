from __future__ import annotations

import networkx as nx
import numpy as np
import pytest

from garlat.graph import BallGraph, FiniteGraph, ParseError, label_str, parse_adjacency_text
from garlat.wmcheck import cycle_graph, hypercube


def test_label_str():
    assert label_str((1, -2, (0, 3))) == "(1,-2,(0,3))"
    assert label_str("ab") == "ab"


def test_adjacency_round_trip():
    g = FiniteGraph.from_edges([(0, 0), (0, 1), (1, 1)], [((0, 0), (0, 1)), ((0, 1), (1, 1))])
    text = g.to_adjacency_text()
    h = parse_adjacency_text(text)
    assert [label_str(v) for v in g.labels] == list(h.labels)
    assert sorted(g.edges()) == sorted(h.edges())
    assert h.to_adjacency_text() == text


def test_parse_adds_missing_vertices_and_comments():
    g = parse_adjacency_text("# a comment\na: b,c\n\nb: a\n")
    assert len(g) == 3 and g.has_edge(g.vertex("a"), g.vertex("c"))


def test_parse_errors():
    with pytest.raises(ParseError):
        parse_adjacency_text("a b c\n")
    with pytest.raises(ParseError):
        parse_adjacency_text("a: a\n")


def test_ball_header_round_trip():
    g = cycle_graph(8)
    b = BallGraph.from_graph(g, 0, 4)
    h = parse_adjacency_text(b.to_adjacency_text())
    assert isinstance(h, BallGraph) and h.radius == 4
    assert h.labels[h.center] == "0"


def test_dot_output():
    dot = cycle_graph(3).to_dot()
    assert dot.startswith("graph G {") and dot.count("--") == 3
    parsed = nx.Graph()
    for line in dot.splitlines():
        if "--" in line:
            a, b = line.strip(" ;").split(" -- ")
            parsed.add_edge(int(a), int(b))
    assert nx.is_isomorphic(parsed, nx.cycle_graph(3))


def test_distances_match_networkx():
    g = hypercube(4)
    ref = dict(nx.all_pairs_shortest_path_length(g.to_networkx()))
    d = g.dist
    assert all(d[i, j] == ref[i][j] for i in range(16) for j in range(16))


def test_relabel_preserves_structure():
    g = hypercube(3)
    perm = np.random.default_rng(0).permutation(len(g))
    h = g.relabel(perm)
    assert nx.is_isomorphic(g.to_networkx(), h.to_networkx())


def test_ball_margin_and_certification():
    g = FiniteGraph.from_edges(range(10), [(i, i + 1) for i in range(9)])
    b = BallGraph.from_graph(g, 0, 9)
    assert b.margin(0) == 9 and b.margin(9) == 0
    assert b.interior.sum() == 9
    assert b.certified(0, 9)


def test_ball_rejects_wrong_radius():
    with pytest.raises(ValueError):
        BallGraph.from_graph(cycle_graph(8), 0, 2)
