"""Finite-resolution fingerprints of closed sets and subgroups.

For a closed set C of the boundary, the level-n fingerprint is the set of
level-n vertices whose cylinder misses C.  For a subgroup H it is the set of
vertices whose rigid stabilizer lies in H.  Comparing fingerprints up to the
group action on subsets of a level is exact; everything computed from ball
enumerations is an approximation at the stated radius.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

from .automorphisms import act_vertex, commutator, is_trivial
from .confinement import Named, Oracle, SubgroupOracle, rist_ball
from .group_actions import GroupSpec, word_str
from .words_tree import Antichain, Ray, TreeSpec, Vertex, normalize, vertex_str

SUBSET_ORBIT_CAP = 10**6


class OrbitCapExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class ClosedSetSpec:
    """A closed subset of the boundary.

    kinds: ``complement`` (boundary minus the cylinders of ``antichain``),
    ``rays`` (a finite set of rays), ``subtree`` (rays whose level-i letter is
    below ``schedule.degree(i)``; a degenerate TreeSpec of sub-degrees).
    """

    kind: str
    antichain: Antichain | None = None
    rays: tuple[Ray, ...] = ()
    schedule: TreeSpec | None = None

    @classmethod
    def complement_of(cls, a: Antichain) -> ClosedSetSpec:
        return cls("complement", antichain=a)

    @classmethod
    def finite_rays(cls, rays: Sequence[Ray]) -> ClosedSetSpec:
        return cls("rays", rays=tuple(rays))

    @classmethod
    def subtree(cls, degrees: Sequence[int], tail_start: int = 0) -> ClosedSetSpec:
        return cls("subtree", schedule=TreeSpec(tuple(degrees), tail_start, degenerate=True))

    def misses(self, v: Vertex, tree: TreeSpec) -> bool:
        """``∂T_v ∩ C`` is empty."""
        if self.kind == "complement":
            return normalize(self.antichain.vertices, tree).covers(v)
        if self.kind == "rays":
            return not any(r.prefix(len(v)) == v for r in self.rays)
        if self.kind == "subtree":
            return any(x >= self.schedule.degree(i) for i, x in enumerate(v))
        raise ValueError(self.kind)

    def __str__(self):
        if self.kind == "complement":
            return f"complement{self.antichain}"
        if self.kind == "rays":
            return "{" + ", ".join(map(str, self.rays)) + "}"
        return f"subtree{list(self.schedule.degrees)}"


@dataclass(frozen=True)
class Fingerprint:
    level: int
    vertices: frozenset

    @classmethod
    def of(cls, level: int, vertices) -> Fingerprint:
        vs = frozenset(tuple(v) for v in vertices)
        if any(len(v) != level for v in vs):
            raise ValueError(f"fingerprint vertices must lie on level {level}")
        return cls(level, vs)

    def __len__(self):
        return len(self.vertices)

    def __contains__(self, v):
        return tuple(v) in self.vertices

    def sorted(self) -> list[Vertex]:
        return sorted(self.vertices)

    def bitset(self, tree: TreeSpec) -> str:
        return "".join("1" if v in self.vertices else "0" for v in tree.vertices(self.level))

    def csv_line(self, tree: TreeSpec) -> str:
        return f"{self.level},{len(self)},{self.bitset(tree)}"

    def __str__(self):
        return "{" + ", ".join(vertex_str(v) for v in self.sorted()) + "}"


FINGERPRINT_CSV_HEADER = "level,size,bits"


def empty_cylinder_fingerprint(C: ClosedSetSpec, n: int, tree: TreeSpec) -> Fingerprint:
    return Fingerprint.of(n, (v for v in tree.vertices(n) if C.misses(v, tree)))


def rist_containment_fingerprint(G: GroupSpec, H: Oracle, n: int, L: int) -> Fingerprint:
    """Vertices whose sampled rigid stabilizer lies in H; shrinks (or stays) as L grows."""
    out = []
    for v in G.tree.vertices(n):
        if all(H.contains(x.element) for x in rist_ball(G, v, L)):
            out.append(v)
    return Fingerprint.of(n, out)


def enumerate_subgroup(G: GroupSpec, H: Oracle, L: int) -> list[Named]:
    """``H ∩ B(L)`` by filtering the ball (plus enumerated word-list elements when available)."""
    return [Named(word_str(w), g) for g, w in G.ball(L) if H.contains(g)]


def fix_level(G: GroupSpec, H: Oracle, n: int, L: int) -> Fingerprint:
    """Level-n vertices fixed by every element of ``H ∩ B(L)``."""
    elems = enumerate_subgroup(G, H, L)
    out = [v for v in G.tree.vertices(n) if all(act_vertex(h.element, v) == v for h in elems)]
    return Fingerprint.of(n, out)


def level_permutations(G: GroupSpec, n: int) -> list[tuple[int, ...]]:
    verts = list(G.tree.vertices(n))
    index = {v: i for i, v in enumerate(verts)}
    return [tuple(index[act_vertex(G.elements_by_label[s], v)] for v in verts) for s in G.labels]


def subset_orbit(G: GroupSpec, S: Fingerprint, cap: int = SUBSET_ORBIT_CAP) -> set[frozenset[int]]:
    verts = list(G.tree.vertices(S.level))
    index = {v: i for i, v in enumerate(verts)}
    perms = level_permutations(G, S.level)
    start = frozenset(index[v] for v in S.vertices)
    seen = {start}
    queue = deque([start])
    while queue:
        s = queue.popleft()
        for p in perms:
            t = frozenset(p[i] for i in s)
            if t not in seen:
                if len(seen) >= cap:
                    raise OrbitCapExceeded(f"orbit exceeds {cap} subsets")
                seen.add(t)
                queue.append(t)
    return seen


def subset_orbit_equal(G: GroupSpec, S1: Fingerprint, S2: Fingerprint, cap: int = SUBSET_ORBIT_CAP) -> bool:
    if S1.level != S2.level:
        raise ValueError("fingerprints on different levels")
    if len(S1) != len(S2):
        return False
    verts = list(G.tree.vertices(S2.level))
    index = {v: i for i, v in enumerate(verts)}
    return frozenset(index[v] for v in S2.vertices) in subset_orbit(G, S1, cap)


@dataclass
class AntichainSubgroup:
    antichain: Antichain
    radius: int
    generators: list[Named]
    derived: list[Named]
    cross_trivial: bool
    by_vertex: dict = field(default_factory=dict)


def antichain_subgroup(G: GroupSpec, V: Antichain, L: int, cross_check_limit: int = 200) -> AntichainSubgroup:
    """Generators of the product of ``rist(v)``, v in V, with same-vertex commutators as derived generators."""
    by_vertex = {v: rist_ball(G, v, L) for v in V.vertices}
    gens, derived = [], []
    seen = set()
    for v, elems in by_vertex.items():
        for x in elems:
            if x.element not in seen:
                seen.add(x.element)
                gens.append(x)
        for x, y in itertools.combinations(elems, 2):
            c = commutator(x.element, y.element)
            if not is_trivial(c):
                derived.append(Named(f"[{x.label},{y.label}]", c))
    cross_ok = True
    checked = 0
    for v, w in itertools.combinations(V.vertices, 2):
        for x, y in itertools.product(by_vertex[v], by_vertex[w]):
            if checked >= cross_check_limit:
                break
            checked += 1
            if not is_trivial(commutator(x.element, y.element)):
                cross_ok = False
    assert cross_ok, "elements with disjoint supports failed to commute"
    return AntichainSubgroup(V, L, gens, derived, cross_ok, by_vertex)


@dataclass(frozen=True)
class SandwichLedger:
    level: int
    radius: int
    fixed: Fingerprint
    moved_antichain: Antichain
    lower_checked: int
    lower_pass: bool
    lower_witness: str | None
    upper_checked: int
    upper_pass: bool
    upper_witness: str | None

    @property
    def ok(self) -> bool:
        return self.lower_pass and self.upper_pass

    def to_json(self) -> dict:
        return {
            "n": self.level,
            "L": self.radius,
            "fix_level": [vertex_str(v) for v in self.fixed.sorted()],
            "moved_antichain": [vertex_str(v) for v in self.moved_antichain.vertices],
            "lower": {"checked": self.lower_checked, "passed": self.lower_pass, "witness": self.lower_witness},
            "upper": {"checked": self.upper_checked, "passed": self.upper_pass, "witness": self.upper_witness},
        }

    def __str__(self):
        lo = "pass" if self.lower_pass else f"fail({self.lower_witness})"
        up = "pass" if self.upper_pass else f"fail({self.upper_witness})"
        return f"sandwich(n={self.level}, L={self.radius}): lower {lo} [{self.lower_checked}], upper {up} [{self.upper_checked}]"


def sandwich_check(G: GroupSpec, H: Oracle, n: int, L: int) -> SandwichLedger:
    """Lower bound: commutators of rist elements at level-n vertices off ``fix_level`` lie in H.

    Upper bound: every enumerated element of H fixes every vertex of ``fix_level``.
    """
    fixed = fix_level(G, H, n, L)
    V = Antichain(tuple(v for v in G.tree.vertices(n) if v not in fixed))
    sub = antichain_subgroup(G, V, L)
    lower_pass, lower_w = True, None
    for c in sub.derived:
        if not H.contains(c.element):
            lower_pass, lower_w = False, c.label
            break
    elems = enumerate_subgroup(G, H, L)
    upper_pass, upper_w = True, None
    for h in elems:
        bad = next((v for v in fixed.sorted() if act_vertex(h.element, v) != v), None)
        if bad is not None:
            upper_pass, upper_w = False, f"{h.label} moves {vertex_str(bad)}"
            break
    return SandwichLedger(n, L, fixed, V, len(sub.derived), lower_pass, lower_w, len(elems), upper_pass, upper_w)


def refinement_consistent(C: ClosedSetSpec, tree: TreeSpec, max_level: int) -> bool:
    """Every child of a fingerprint vertex lies in the next level's fingerprint."""
    prev = empty_cylinder_fingerprint(C, 0, tree)
    for n in range(1, max_level + 1):
        cur = empty_cylinder_fingerprint(C, n, tree)
        if not all(c in cur for v in prev.vertices for c in tree.children(v)):
            return False
        prev = cur
    return True


def point_stabilizer_fingerprints(G: GroupSpec, ray: Ray, n: int, L: int) -> dict:
    """Both fingerprints for the stabilizer of a ray, as used by the CLI."""
    H = SubgroupOracle.point_stabilizer(ray)
    C = ClosedSetSpec.finite_rays([ray])
    return {
        "empty_cylinder": empty_cylinder_fingerprint(C, n, G.tree),
        "rist_containment": rist_containment_fingerprint(G, H, n, L),
        "fix_level": fix_level(G, H, n, L),
    }
