import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import brute_orbit
from treeconf import urs_lab as ul
from treeconf.confinement import SubgroupOracle
from treeconf.words_tree import Antichain, Ray, TreeSpec, vertex_str

BINARY = TreeSpec.regular(2)
ONE = Ray.parse("(1)")

CLOSED_SETS = [
    ul.ClosedSetSpec.finite_rays([ONE]),
    ul.ClosedSetSpec.finite_rays([ONE, Ray.parse("0(01)")]),
    ul.ClosedSetSpec.complement_of(Antichain.of([(1,)])),
    ul.ClosedSetSpec.complement_of(Antichain.of([(0, 1), (1, 1, 0)])),
    ul.ClosedSetSpec.subtree([1, 2]),
    ul.ClosedSetSpec.subtree([2, 1, 1], tail_start=1),
]


def names(fp):
    return [vertex_str(v) for v in fp.sorted()]


def test_empty_cylinder_fingerprints():
    assert len(ul.empty_cylinder_fingerprint(CLOSED_SETS[0], 3, BINARY)) == 7
    assert names(ul.empty_cylinder_fingerprint(CLOSED_SETS[2], 2, BINARY)) == ["10", "11"]
    sizes = [len(ul.empty_cylinder_fingerprint(CLOSED_SETS[4], n, BINARY)) for n in range(6)]
    assert sizes == [0, 1, 2, 6, 12, 28]


@pytest.mark.parametrize("C", CLOSED_SETS, ids=str)
def test_refinement_consistency(C):
    assert ul.refinement_consistent(C, BINARY, 6)


def test_subtree_matches_brute_force():
    C = CLOSED_SETS[4]
    for n in range(7):
        expected = {v for v in itertools.product(range(2), repeat=n) if any(x >= (1, 2)[i % 2] for i, x in enumerate(v))}
        assert ul.empty_cylinder_fingerprint(C, n, BINARY).vertices == expected


def test_subgroup_fingerprints(grig):
    for H in (SubgroupOracle.point_stabilizer(ONE), SubgroupOracle.germ_stabilizer(ONE)):
        assert names(ul.rist_containment_fingerprint(grig, H, 1, 3)) == ["0"]
    assert len(ul.fix_level(grig, SubgroupOracle.germ_stabilizer(ONE), 2, 4)) == 4
    assert names(ul.fix_level(grig, SubgroupOracle.point_stabilizer(ONE), 3, 4)) == ["110", "111"]


@settings(max_examples=6)
@given(st.integers(1, 3))
def test_rist_fingerprint_monotone_in_L(grig, n):
    H = SubgroupOracle.point_stabilizer(ONE)
    prints = [ul.rist_containment_fingerprint(grig, H, n, L) for L in (1, 2, 3)]
    assert prints[0].vertices >= prints[1].vertices >= prints[2].vertices


def test_orbit_equality_brute_force(grig):
    perms = ul.level_permutations(grig, 2)
    verts = list(BINARY.vertices(2))
    for r in range(5):
        for S1 in itertools.combinations(range(4), r):
            orbit = brute_orbit(perms, frozenset(S1))
            for S2 in itertools.combinations(range(4), r):
                fp1 = ul.Fingerprint.of(2, [verts[i] for i in S1])
                fp2 = ul.Fingerprint.of(2, [verts[i] for i in S2])
                assert ul.subset_orbit_equal(grig, fp1, fp2) == (frozenset(S2) in orbit)


@settings(max_examples=25)
@given(st.sets(st.integers(0, 7)), st.sets(st.integers(0, 7)), st.sets(st.integers(0, 7)))
def test_orbit_equality_is_an_equivalence(grig, a, b, c):
    verts = list(BINARY.vertices(3))
    fa, fb, fc = (ul.Fingerprint.of(3, [verts[i] for i in s]) for s in (a, b, c))
    assert ul.subset_orbit_equal(grig, fa, fa)
    assert ul.subset_orbit_equal(grig, fa, fb) == ul.subset_orbit_equal(grig, fb, fa)
    if ul.subset_orbit_equal(grig, fa, fb) and ul.subset_orbit_equal(grig, fb, fc):
        assert ul.subset_orbit_equal(grig, fa, fc)


def test_orbit_cap(grig):
    fp = ul.Fingerprint.of(4, [(0, 0, 0, 0), (1, 0, 1, 0)])
    with pytest.raises(ul.OrbitCapExceeded):
        ul.subset_orbit(grig, fp, cap=3)


@pytest.mark.parametrize(
    "H",
    [SubgroupOracle.point_stabilizer(ONE), SubgroupOracle.whole(), SubgroupOracle.rigid_stabilizer((0,))],
    ids=lambda h: h.name,
)
def test_sandwich(grig, H):
    ledger = ul.sandwich_check(grig, H, 3, 4)
    assert ledger.ok, str(ledger)


def test_antichain_subgroup_commutes(grig):
    sub = ul.antichain_subgroup(grig, Antichain.of([(0, 0), (1, 1)]), 3)
    assert sub.cross_trivial and sub.generators


def test_fingerprint_csv(grig):
    fp = ul.fix_level(grig, SubgroupOracle.point_stabilizer(ONE), 3, 4)
    assert fp.csv_line(grig.tree) == "3,2,00000011"
    with pytest.raises(ValueError):
        ul.Fingerprint.of(2, [(0,)])
