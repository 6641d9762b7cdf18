import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import GROUP_NAMES, group_and_words, vertex_in, words
from oracles import REFERENCE, act_word, same_action
from treeconf.automorphisms import (
    TreeAutomorphism,
    act_ray,
    act_vertex,
    activity,
    bounded_check,
    commutator,
    compose,
    conjugate,
    equals,
    fixes_cylinder,
    in_rigid_stabilizer,
    invert,
    is_trivial,
    level_state_counts,
    nucleus,
    order,
    portrait,
    section,
    section_closure,
    support_antichain,
)
from treeconf.registry import load_group
from treeconf.words_tree import Ray, TreeSpec, partition_check

# Depth to which action agreement stands in for equality of short words.
COHERENCE_DEPTH = {2: 12, 3: 8}


def test_grigorchuk_relations(grig):
    for s in "abcd":
        assert is_trivial(compose(grig.element(s), grig.element(s)))
    assert is_trivial(grig.element("b c d"))
    assert grig.element("b c") == grig.element("d")
    # (ad)^4 = 1 but ad has order 4 exactly
    assert order(grig.element("a d")) == 4
    assert order(grig.element("a b")) == 16


def test_infinite_orders(adding, basilica):
    assert order(adding.element("a"), limit=256) is None
    assert order(basilica.element("a b"), limit=64) is None


def test_gupta_sidki_orders(gupta):
    assert order(gupta.element("a")) == 3
    assert order(gupta.element("t")) == 3


def test_nuclei(grig, adding):
    assert nucleus(list(grig.generators.values())) == {grig.identity, *grig.generators.values()}
    a = adding.element("a")
    assert nucleus([a]) == {adding.identity, a, invert(a)}


@given(group_and_words(n=2))
def test_nucleus_closed_under_sections(data):
    G, w1, w2 = data
    N = nucleus(list(G.generators.values()))
    for g in N:
        assert all(section(g, (x,)) in N for x in range(G.tree.degree(0)))
    # sections of any element eventually land in the nucleus
    g = G.evaluate(w1 + w2)
    deep = {g.from_state(s) for s in level_state_counts(g, len(w1 + w2) + 1)}
    assert deep <= N


@settings(max_examples=500)
@given(st.data())
def test_wreath_identity(data):
    G = load_group(data.draw(st.sampled_from(GROUP_NAMES)))
    g = G.evaluate(data.draw(words(G)))
    h = G.evaluate(data.draw(words(G)))
    v = data.draw(vertex_in(G.tree, 6))
    lhs = section(compose(g, h), v)
    rhs = compose(section(g, act_vertex(h, v)), section(h, v))
    assert lhs == rhs


@settings(max_examples=150)
@given(group_and_words(n=2))
def test_equality_coherence(data):
    G, w1, w2 = data
    depth = COHERENCE_DEPTH[G.tree.degree(0)]
    assert equals(G.evaluate(w1), G.evaluate(w2)) == same_action(G.name, w1, w2, depth)


@given(group_and_words(n=1), st.data())
def test_action_matches_reference(data, draw):
    G, w = data
    v = draw.draw(vertex_in(G.tree, 8))
    assert act_vertex(G.evaluate(w), v) == act_word(G.name, w, v)


@given(group_and_words(n=3))
def test_group_axioms(data):
    G, w1, w2, w3 = data
    g, h, k = (G.evaluate(w) for w in (w1, w2, w3))
    assert compose(compose(g, h), k) == compose(g, compose(h, k))
    assert is_trivial(compose(g, invert(g)))
    assert hash(compose(g, h)) == hash(G.evaluate(w1 + w2))
    assert conjugate(g, h) == compose(compose(h, g), invert(h))
    assert commutator(g, h) == compose(compose(g, h), compose(invert(g), invert(h)))


@given(group_and_words(n=2))
def test_activity_subadditive(data):
    G, w1, w2 = data
    g, h = G.evaluate(w1), G.evaluate(w2)
    for n in range(6):
        assert activity(compose(g, h), n) <= activity(g, n) + activity(h, n)


@given(group_and_words(n=1))
def test_support_antichain_exact(data):
    G, w = data
    g = G.evaluate(w)
    depth = 4 if G.tree.degree(0) == 2 else 3
    cov = support_antichain(g, depth)
    assert partition_check(cov.cover.vertices + cov.fixed.vertices, G.tree, depth)
    for v in cov.fixed.vertices:
        assert fixes_cylinder(g, v)
    if cov.exact:
        for v in cov.cover.vertices:
            assert not fixes_cylinder(g, v)


def test_bounded_check_shapes(grig, adding, basilica):
    for s in "bcd":
        v = bounded_check(grig.element(s), 10)
        assert v.kind == "bounded_with" and v.rays == (Ray.parse("(1)"),)
    assert bounded_check(grig.element("a"), 10).rays == ()
    v = bounded_check(adding.element("a"), 10)
    assert v.kind == "bounded_with" and v.bound == 1
    assert bounded_check(basilica.element("a"), 10).kind == "bounded_with"


def test_unbounded_evidence():
    tree = TreeSpec.regular(2)
    # g = (g, g) swapped at the root: activity doubles every level
    g = TreeAutomorphism.from_table(tree, {"g": (0, (1, 0), ("g", "g"))}, "g")
    v = bounded_check(g, 8)
    assert v.kind == "unbounded_evidence"
    assert v.activity == tuple(2**n for n in range(9))


def test_section_closure(grig):
    closure = section_closure([grig.element("a b")])
    assert grig.element("a b") in closure and grig.element("a") in closure


def test_rigid_stabilizer_and_ray_action(grig):
    d = grig.element("d")
    assert in_rigid_stabilizer(d, (1,))
    assert not in_rigid_stabilizer(grig.element("b"), (1,))
    assert act_ray(grig.element("b"), Ray.parse("(1)")) == Ray.parse("(1)")
    assert act_ray(grig.element("a"), Ray.parse("(1)")) == Ray.parse("0(1)")


def test_json_round_trip(gupta):
    g = gupta.element("t a t^-1 a")
    assert TreeAutomorphism.from_json(gupta.tree, g.to_json()) == g


def test_finitary_portrait():
    tree = TreeSpec.regular(2)
    g = TreeAutomorphism.finitary(tree, {(): (1, 0), (0, 1): (1, 0)})
    p = portrait(g, 3)
    assert p.nontrivial_vertices() == [(), (0, 1)]
    assert activity(g, 3) == 0


@pytest.mark.parametrize("name", list(REFERENCE))
def test_generators_match_reference_deep(name):
    G = load_group(name)
    d = G.tree.degree(0)
    depth = COHERENCE_DEPTH[d]
    for label in G.labels:
        g = G.element(label)
        assert all(act_vertex(g, v) == act_word(name, (label,), v) for v in G.tree.vertices(depth))


@settings(max_examples=100)
@given(group_and_words(n=1), st.data())
def test_equality_coherence_on_equal_pairs(data, draw):
    G, w = data
    s = draw.draw(st.sampled_from(G.labels))
    i = draw.draw(st.integers(0, len(w)))
    padded = w[:i] + (s, G.label_inverse(s)) + w[i:]
    depth = COHERENCE_DEPTH[G.tree.degree(0)]
    assert equals(G.evaluate(w), G.evaluate(padded))
    assert same_action(G.name, w, padded, depth)
