import json

import pytest

from treeconf import group_actions as ga
from treeconf.automorphisms import portrait
from treeconf.export import canonical, export, graph_to_dot, portrait_to_dot, to_json
from treeconf.words_tree import Ray


def test_schreier_dot(grig):
    dot = graph_to_dot(ga.level_schreier(grig, 3))
    nodes = [line for line in dot.splitlines() if "[label=" in line and "->" not in line]
    edges = [line for line in dot.splitlines() if "->" in line]
    assert len(nodes) == 8 and len(edges) == 32
    assert all('label="' in e for e in edges)
    assert dot == graph_to_dot(ga.level_schreier(grig, 3))


def test_canonical_floats_and_sets():
    assert canonical({"x": 1 / 3, "s": {3, 1}}) == {"x": 0.333333, "s": [1, 3]}
    assert to_json({"b": 1, "a": (1.0000001,)}) == '{\n  "a": [\n    1.0\n  ],\n  "b": 1\n}\n'


def test_graph_json_round_trip(grig):
    g = ga.orbital_ball(grig, Ray.parse("(1)"), 6)
    data = json.loads(export(g, "graph", "json"))
    assert len(data["vertices"]) == len(g) and data["base"] == g.base
    assert [tuple(e) for e in data["edges"]] == g.edge_list()


def test_growth_csv(grig):
    table = ga.graph_growth(ga.orbital_ball(grig, Ray.parse("(1)"), 8), 4)
    assert export(table, "growth", "csv").startswith("radius,max_ball,min_ball,base_ball\n")


def test_unsupported_pairing(grig):
    with pytest.raises(ValueError, match="cannot export"):
        export(ga.level_schreier(grig, 2), "graph", "csv")


def test_portrait_dot(grig):
    dot = portrait_to_dot(portrait(grig.element("b"), 2), name="b")
    assert '"1" [label="."]' in dot and '"0" [label="10"]' in dot
