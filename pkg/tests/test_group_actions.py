from collections import deque

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import GROUP_NAMES
from oracles import level_perm
from treeconf import group_actions as ga
from treeconf.registry import load_group
from treeconf.words_tree import Ray

GRIG_BALLS = [1, 5, 11, 23, 40, 68, 108]


def reference_ball_sizes(name, labels, radius, depth):
    """Cayley ball sizes with elements identified by their action on a deep level."""
    gens = [level_perm(name, s, depth) for s in labels]
    start = tuple(range(len(gens[0])))
    seen = {start}
    frontier = [start]
    sizes = [1]
    for _ in range(radius):
        nxt = []
        for p in frontier:
            for g in gens:
                q = tuple(g[list(p)])
                if q not in seen:
                    seen.add(q)
                    nxt.append(q)
        frontier = nxt
        sizes.append(len(seen))
    return sizes


def reference_level_distances(name, labels, depth, source):
    gens = [level_perm(name, s, depth) for s in labels]
    dist = {source: 0}
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for g in gens:
            v = int(g[u])
            if v not in dist:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def test_cayley_ball_sizes(grig):
    assert [len(grig.ball(r)) for r in range(7)] == GRIG_BALLS
    assert reference_ball_sizes("grigorchuk", grig.labels, 6, 10) == GRIG_BALLS
    assert len(grig.ball(10)) == 643


def test_cayley_graph_edges(grig):
    g = ga.cayley_ball(grig, 3)
    assert len(g) == 23
    # every edge goes g -> s.g
    for u, s, v in g.edge_list():
        assert g.payloads[v] == grig.elements_by_label[s] * g.payloads[u]


def test_level_schreier(grig, gupta):
    g = ga.level_schreier(grig, 3)
    assert len(g) == 8 and len(g.edge_list()) == 32
    assert len(ga.level_schreier(gupta, 4)) == 81
    with pytest.raises(ga.LevelTooLarge):
        ga.level_schreier(grig, 20, cap=2**18)


@pytest.mark.parametrize("name", GROUP_NAMES)
def test_schreier_labels_involutive(name):
    G = load_group(name)
    g = ga.level_schreier(G, 4 if G.tree.degree(0) == 2 else 3)
    edges = set(g.edge_list())
    for u, s, v in edges:
        assert (v, G.label_inverse(s), u) in edges


def test_orbital_ball_linear(grig):
    g = ga.orbital_ball(grig, Ray.parse("1^inf"), 64)
    assert len(g) == 65
    # independent: distances from 1^12 in the level-12 Schreier graph
    dist = reference_level_distances("grigorchuk", grig.labels, 12, 2**12 - 1)
    assert sum(1 for d in dist.values() if d <= 64) == 65
    table = ga.graph_growth(g, 32)
    assert table.max_ball() == [2 * r + 1 for r in range(33)]
    fit = ga.fit_growth_degree(table)
    assert fit["degree"] == 1 and fit["residual"] < 0.02 and fit["window"] == [8, 32]


@settings(max_examples=20)
@given(st.sampled_from(GROUP_NAMES), st.integers(2, 10))
def test_growth_monotone(name, R):
    G = load_group(name)
    table = ga.graph_growth(ga.orbital_ball(G, Ray.constant(G.tree.degree(0) - 1), 2 * R), R)
    sizes = table.max_ball()
    assert all(a <= b for a, b in zip(sizes, sizes[1:]))
    assert all(row.min_ball <= row.max_ball for row in table.rows)


def test_known_radius_marks_boundary(grig):
    g = ga.orbital_ball(grig, Ray.parse("(1)"), 5)
    rho = g.known_radius()
    assert rho[g.base] == 5
    assert all(r >= 0 for r, c in zip(rho, g.complete) if c)


def test_embedding(grig):
    orbital = ga.orbital_ball(grig, Ray.parse("(1)"), 40)
    res = ga.ball_embedding_test(grig, orbital, 6)
    assert not res.embeds and str(res).startswith("no_embedding(R=6")
    cay = ga.cayley_ball(grig, 8)
    assert ga.ball_embedding_test(grig, cay, 4).embeds


@pytest.mark.parametrize(
    "name, ray, germ_size, orbital_size, fiber",
    [("grigorchuk", "(1)", 33, 9, 4), ("gupta_sidki_3", "(2)", 85, 31, 3), ("basilica", "(0)", 15, 15, 1)],
)
def test_germ_covering(name, ray, germ_size, orbital_size, fiber):
    G = load_group(name)
    x = Ray.parse(ray)
    germ = ga.germ_ball(G, x, 8)
    assert (len(germ.graph), len(germ.orbital)) == (germ_size, orbital_size)
    assert ga.verify_covering(germ) == []
    prof = ga.fiber_profile(G, x, 8)
    assert prof.base_fiber == fiber and prof.constant


def test_germ_equals_orbital_for_free_action(adding):
    x = Ray.parse("(0)")
    germ = ga.germ_ball(adding, x, 5)
    assert len(germ.graph) == len(germ.orbital) == 11


def test_cut_sets_on_path_like_graphs(grig):
    path = ga.path_graph(100)
    cert = ga.cut_set_sequence(path, 1, 50)
    assert cert is not None and len(cert) == 100
    big = ga.orbital_ball(grig, Ray.parse("(1)"), 511)
    assert len(big) == 512
    cert = ga.cut_set_sequence(big, 3, 20)
    assert cert is not None and len(cert) >= 20 and max(cert.boundaries) <= 3
    adj = big.undirected()
    for vs, b in zip(cert.sets(), cert.boundaries):
        assert len(ga.vertex_boundary(adj, vs)) == b
    bound = ga.leud_upper(cert)
    assert (bound.bound, bound.rule) == (1, "cut_sets")


def test_grid_has_no_small_cuts():
    grid = ga.grid_graph(32, 32)
    assert ga.cut_set_sequence(grid, 3, 20) is None
    bound = ga.leud_upper(ga.graph_growth(grid, 16))
    assert (bound.bound, bound.rule) == (2, "growth_fit")
    assert bound.detail["residual"] < 0.1


def test_fit_needs_three_radii():
    with pytest.raises(ga.EvidenceInsufficient):
        ga.fit_growth_degree(ga.graph_growth(ga.path_graph(20), 2))


def test_growth_csv_header(grig):
    csv = ga.graph_growth(ga.orbital_ball(grig, Ray.parse("(1)"), 8), 4).to_csv()
    assert csv.splitlines()[0] == "radius,max_ball,min_ball,base_ball"
    assert csv.splitlines()[1] == "0,1,1,1"


def test_word_parsing(grig, gupta):
    assert grig.parse_word("abcd") == ("a", "b", "c", "d")
    assert grig.parse_word("a*b") == ("a", "b")
    assert gupta.parse_word("t^-1 a") == ("t^-1", "a")
    with pytest.raises((KeyError, ValueError)):
        grig.parse_word("x")
