import pytest
from hypothesis import given, settings

from conftest import group_and_words
from treeconf import confinement as cf
from treeconf.automorphisms import act_ray, act_vertex, conjugate, invert, is_trivial
from treeconf.registry import load_group
from treeconf.words_tree import Antichain, Ray, independent

ONE = Ray.parse("(1)")


def oracles_for(G):
    top = G.tree.degree(0) - 1
    return [
        cf.SubgroupOracle.point_stabilizer(Ray.constant(top)),
        cf.SubgroupOracle.germ_stabilizer(Ray.constant(top)),
        cf.SubgroupOracle.rigid_stabilizer((0,)),
        cf.SubgroupOracle.fixator(Antichain.of([(0,), (1, 0)])),
    ]


@settings(max_examples=80)
@given(group_and_words(n=2))
def test_conjugate_fast_path_matches_definition(data):
    G, w1, w2 = data
    sigma, g = G.evaluate(w1), G.evaluate(w2)
    for H in oracles_for(G):
        assert H.contains_conjugate(sigma, g) == H.contains(conjugate(sigma, invert(g)))


def test_point_stabilizer_confined(grig):
    P = [grig.element(s) for s in "bcd"]
    H = cf.SubgroupOracle.point_stabilizer(ONE)
    v = cf.check_confining(P, H, grig, 10)
    assert v.confirmed and str(v) == "confirmed_up_to(L=10)" and v.checked == 643
    # brute force: some sigma fixes g(1^inf) for every g in the ball
    for g, _ in grig.ball(6):
        assert any(act_ray(s, act_ray(g, ONE)) == act_ray(g, ONE) for s in P)


def test_trivial_subgroup_refutes_at_identity(grig, adding):
    for G, word in ((grig, "a"), (adding, "a")):
        v = cf.check_confining([G.element(word)], cf.SubgroupOracle.word_list([]), G, 4)
        assert not v.confirmed and str(v) == "refuted_at(g=1, L=4)"


def test_refutation_is_stable_in_L(grig):
    P = [grig.element("a")]
    H = cf.SubgroupOracle.point_stabilizer(ONE)
    verdicts = [cf.check_confining(P, H, grig, L) for L in range(0, 6)]
    first = next(i for i, v in enumerate(verdicts) if not v.confirmed)
    assert all(not v.confirmed and v.witness_word == verdicts[first].witness_word for v in verdicts[first:])


def test_word_list_oracle(adding):
    H = cf.SubgroupOracle.word_list([adding.element("a a")], scope=64)
    P = [adding.element("a a")]
    assert cf.check_confining(P, H, adding, 6).confirmed
    # <a^2> is infinite, so enumeration cannot rule out a
    with pytest.raises(cf.OracleScopeExceeded):
        cf.check_confining([adding.element("a")], H, adding, 6)
    finite = cf.SubgroupOracle.word_list([load_group("grigorchuk").element("a")])
    assert not finite.contains(load_group("grigorchuk").element("b")) and finite.scope_note.endswith("(closed)")


def test_word_list_scope(grig):
    H = cf.SubgroupOracle.word_list([grig.element("a"), grig.element("b")], scope=4)
    assert H.contains(grig.element("a b"))
    with pytest.raises(cf.OracleScopeExceeded):
        H.contains(grig.element("c"))


def test_any_of(grig):
    H = cf.AnyOf((cf.SubgroupOracle.rigid_stabilizer((0,)), cf.SubgroupOracle.rigid_stabilizer((1,))))
    assert H.contains(grig.element("d")) and not H.contains(grig.element("a"))


def test_rist_ball(grig, adding):
    assert [x.label for x in cf.rist_ball(grig, (1,), 1)] == ["d", "k1@1", "k2@1", "k3@1"]
    assert [x.label for x in cf.rist_ball(grig, (0,), 3)][:2] == ["ada", "k1@0"]
    assert cf.rist_ball(adding, (0,), 4) == []
    for x in cf.rist_ball(grig, (0, 1), 4):
        assert cf.SubgroupOracle.rigid_stabilizer((0, 1)).contains(x.element)


def test_displacement_adding_machine(adding):
    cfg = cf.build_displacement([adding.element("a")], 8, ["a"])
    assert [[v for v in a.vertices] for a in cfg.omega] == [[(0, 0)]]
    assert cf.verify_displacement(cfg).ok
    bad = cf.DisplacementConfig((adding.element("a"),), (Antichain.of([(0,)]),), ("a",))
    rep = cf.verify_displacement(bad)
    assert rep.c1 and not rep.c4


def test_order_two_obstruction(grig):
    with pytest.raises(cf.OrderTwoObstruction):
        cf.build_displacement([grig.element("a")], 8, ["a"])


def test_displacement_two_elements(grig):
    P = [grig.element("a b"), grig.element("a d")]
    cfg = cf.build_displacement(P, 8, ["ab", "ad"])
    assert [a.vertices for a in cfg.omega] == [((0, 0, 0),), ((0, 0, 0),)]
    rep = cf.verify_displacement(cfg)
    assert rep.ok, str(rep)


@settings(max_examples=30)
@given(group_and_words(n=1, max_len=6))
def test_built_configs_verify(data):
    G, w = data
    g = G.evaluate(w)
    if is_trivial(g):
        return
    try:
        cfg = cf.build_displacement([g], 6, ["g"])
    except (cf.OrderTwoObstruction, cf.DepthBudgetExceeded):
        return
    assert cf.verify_displacement(cfg).ok
    (omega,) = cfg.omega
    v = omega.vertices[0]
    assert independent(act_vertex(g, v), v)


def test_refine_and_engine_small(grig):
    P = [grig.element(s) for s in "bcd"]
    H = cf.SubgroupOracle.point_stabilizer(ONE)
    r = cf.refine_confining(P, H, grig, 6, ["b", "c", "d"])
    assert r.ok
    cfg = cf.build_displacement(list(r.P), 8, list(r.labels))
    assert cf.verify_displacement(cfg).ok
    report = cf.commutator_engine(cfg, H, grig, 6, rist_radius=2, max_sample=12)
    assert report.all_pass, [e for e in report.ledger if not e.passed]
    assert report.chosen is not None and "L=6" in report.verdict


def test_rist_derived(grig):
    assert cf.check_rist_derived_in_H(grig, (0,), cf.SubgroupOracle.point_stabilizer(ONE), 4).holds
    res = cf.check_rist_derived_in_H(grig, (0,), cf.SubgroupOracle.point_stabilizer(Ray.parse("(0)")), 4)
    assert not res.holds and res.counterexample == ("ada", "k1@0")


@pytest.mark.parametrize("name, v", [("grigorchuk", (1,)), ("grigorchuk", (0, 1)), ("basilica", (0,)), ("basilica", (1,))])
def test_fc_class_growth(name, v):
    G = load_group(name)
    sample = cf.rist_ball(G, v, 3)[:4]
    assert sample
    for x in sample:
        sizes = cf.conjugacy_class_sizes(G, x.element, [1, 2, 3, 4])
        assert all(a < b for a, b in zip(sizes, sizes[1:])), (x.label, sizes)


def test_fc_sizes_frozen(grig):
    assert cf.conjugacy_class_sizes(grig, grig.element("d"), [1, 2, 3, 4, 5]) == [2, 3, 4, 7, 10]
