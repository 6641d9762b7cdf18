"""Bratteli diagrams, their path spaces and prefix replacements.

A diagram has vertex levels V_0, V_1, ... with V_0 a single vertex, and edge
sets E_{i+1} from V_i to V_{i+1}.  Finitely many levels are stored; with
``tail_start`` the stored levels repeat from that index on.  A finite path is
a tuple of edge indices, one per level.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .automorphisms import TreeAutomorphism, act_vertex, activity, bounded_check, ray_states, section
from .words_tree import Ray, TreeSpec, Vertex

Path_ = tuple[int, ...]


class DiagramError(ValueError):
    pass


@dataclass(frozen=True)
class BratteliDiagram:
    sizes: tuple[int, ...]  # |V_i| for the stored levels
    edges: tuple[tuple[tuple[int, int], ...], ...]  # edges[i]: (origin in V_i, target in V_{i+1})
    tail_start: int = 0

    def __post_init__(self):
        if not self.sizes or len(self.sizes) != len(self.edges):
            raise DiagramError("need one edge list per stored level")
        if self.sizes[0] != 1:
            raise DiagramError("level 0 must be a single root vertex")
        if not 0 <= self.tail_start < len(self.sizes):
            raise DiagramError("tail_start outside the stored levels")
        for i, es in enumerate(self.edges):
            nxt = self.sizes[i + 1] if i + 1 < len(self.sizes) else self.sizes[self.tail_start]
            if self.sizes[i] < 1:
                raise DiagramError(f"level {i} is empty")
            for o, t in es:
                if not (0 <= o < self.sizes[i] and 0 <= t < nxt):
                    raise DiagramError(f"dangling edge ({o}, {t}) at level {i}")
            if {o for o, _ in es} != set(range(self.sizes[i])):
                raise DiagramError(f"origin map not surjective at level {i}: a vertex has no outgoing edge")
            if {t for _, t in es} != set(range(nxt)):
                raise DiagramError(f"target map not surjective into level {i + 1}")

    def _stored(self, i: int) -> int:
        if i < len(self.sizes):
            return i
        period = len(self.sizes) - self.tail_start
        return self.tail_start + (i - self.tail_start) % period

    def level_size(self, i: int) -> int:
        return self.sizes[self._stored(i)]

    def level_edges(self, i: int) -> tuple[tuple[int, int], ...]:
        """Edges from V_i to V_{i+1}."""
        return self.edges[self._stored(i)]

    @property
    def is_tree_like(self) -> bool:
        return all(s == 1 for s in self.sizes)

    def target(self, path: Path_) -> int:
        v = 0
        for i, e in enumerate(path):
            o, t = self.level_edges(i)[e]
            if o != v:
                raise DiagramError(f"edge {e} at level {i} does not start at vertex {v}")
            v = t
        return v

    def is_path(self, path: Path_) -> bool:
        try:
            self.target(path)
        except (DiagramError, IndexError):
            return False
        return True

    def paths(self, n: int) -> list[Path_]:
        out: list[Path_] = [()]
        ends = [0]
        for i in range(n):
            es = self.level_edges(i)
            nxt, nends = [], []
            for p, v in zip(out, ends):
                for k, (o, t) in enumerate(es):
                    if o == v:
                        nxt.append(p + (k,))
                        nends.append(t)
            out, ends = nxt, nends
        return out

    def paths_to(self, n: int, v: int) -> list[Path_]:
        return [p for p in self.paths(n) if self.target(p) == v]

    def extensions(self, path: Path_, n: int) -> list[Path_]:
        """Paths of length ``n`` starting with ``path``."""
        out = [path]
        ends = [self.target(path)]
        for i in range(len(path), n):
            es = self.level_edges(i)
            nxt, nends = [], []
            for p, v in zip(out, ends):
                for k, (o, t) in enumerate(es):
                    if o == v:
                        nxt.append(p + (k,))
                        nends.append(t)
            out, ends = nxt, nends
        return out

    def to_json(self) -> dict:
        levels = [{"vertices": s, "edges": [list(e) for e in es]} for s, es in zip(self.sizes, self.edges)]
        out = {"levels": levels, "tail": "repeat"}
        if self.tail_start:
            out["tail_start"] = self.tail_start
        return out

    @classmethod
    def from_json(cls, data: dict) -> BratteliDiagram:
        if data.get("tail", "repeat") != "repeat":
            raise DiagramError("only repeating tails are supported")
        try:
            levels = data["levels"]
            sizes = tuple(int(lv["vertices"]) for lv in levels)
            edges = tuple(tuple((int(o), int(t)) for o, t in lv["edges"]) for lv in levels)
        except (KeyError, TypeError, ValueError) as exc:
            raise DiagramError(f"malformed diagram: {exc}") from None
        return cls(sizes, edges, int(data.get("tail_start", 0)))

    @classmethod
    def stationary_tree(cls, degrees: Sequence[int]) -> BratteliDiagram:
        """One vertex per level with ``degrees[i]`` edges, repeating."""
        return cls(tuple(1 for _ in degrees), tuple(tuple((0, 0) for _ in range(d)) for d in degrees), 0)


def load_diagram(file: str | Path | dict) -> BratteliDiagram:
    data = file if isinstance(file, dict) else json.loads(Path(file).read_text())
    return BratteliDiagram.from_json(data)


@dataclass(frozen=True)
class PrefixReplacement:
    """``gamma x -> eta x`` on the cylinder of ``gamma``; needs ``tg(gamma) = tg(eta)``."""

    diagram: BratteliDiagram
    source: Path_
    dest: Path_

    def __call__(self, path: Path_) -> Path_:
        n = len(self.source)
        if tuple(path[:n]) != self.source:
            raise DiagramError("path outside the domain cylinder")
        return self.dest + tuple(path[n:])

    def then(self, other: PrefixReplacement) -> PrefixReplacement:
        """``other ∘ self``; defined when the range of self is the domain of other."""
        if other.source != self.dest:
            raise DiagramError("ranges and domains do not match")
        return PrefixReplacement(self.diagram, self.source, other.dest)


def prefix_replacement(diagram: BratteliDiagram, gamma: Path_, eta: Path_) -> PrefixReplacement:
    gamma, eta = tuple(gamma), tuple(eta)
    if len(gamma) != len(eta):
        raise DiagramError("prefixes end on different levels")
    if diagram.target(gamma) != diagram.target(eta):
        raise DiagramError("prefixes end at different vertices")
    return PrefixReplacement(diagram, gamma, eta)


def _covers_once(diagram: BratteliDiagram, cylinders: Sequence[Path_]) -> bool:
    depth = max((len(c) for c in cylinders), default=0)
    counts = dict.fromkeys(diagram.paths(depth), 0)
    for c in cylinders:
        for p in diagram.extensions(c, depth):
            counts[p] += 1
    return all(v == 1 for v in counts.values())


@dataclass(frozen=True)
class BoundedTypeHomeo:
    """A finitary homeomorphism given by prefix-replacement rules.

    The rule domains partition the path space, as do the rule targets.
    """

    diagram: BratteliDiagram
    rules: tuple[tuple[Path_, Path_], ...]

    def __post_init__(self):
        rules = tuple((tuple(g), tuple(e)) for g, e in self.rules)
        object.__setattr__(self, "rules", rules)
        for g, e in rules:
            prefix_replacement(self.diagram, g, e)
        if not _covers_once(self.diagram, [g for g, _ in rules]):
            raise DiagramError("rule domains do not partition the path space")
        if not _covers_once(self.diagram, [e for _, e in rules]):
            raise DiagramError("rule targets do not partition the path space")

    @property
    def depth(self) -> int:
        return max(len(g) for g, _ in self.rules)

    def __call__(self, path: Path_) -> Path_:
        for g, e in self.rules:
            if tuple(path[: len(g)]) == g:
                return e + tuple(path[len(g):])
        raise DiagramError("path shorter than the rule covering it")

    def is_prefix_replacement_on(self, gamma: Path_) -> bool:
        """Does the restriction to ``C_gamma`` coincide with a single prefix replacement?"""
        n = len(gamma)
        shift = None
        for g, e in self.rules:
            if len(g) <= n and gamma[: len(g)] == g:
                return True
            if len(g) > n and g[:n] == gamma:
                if g[n:] != e[n:]:
                    return False
                if shift is None:
                    shift = e[:n]
                elif shift != e[:n]:
                    return False
        return True


@dataclass(frozen=True)
class SingularityProfile:
    horizon: int
    counts: tuple[tuple[tuple[int, int], ...], ...]  # per level: (vertex, A_v)
    activity: tuple[int, ...] | None
    singular_rays: tuple[Ray, ...] | None
    verdict: str

    def level_totals(self) -> list[int]:
        return [sum(c for _, c in lvl) for lvl in self.counts]

    def sup(self) -> int:
        return max((c for lvl in self.counts for _, c in lvl), default=0)

    def to_csv(self) -> str:
        lines = ["level,vertex,A_v"]
        for n, lvl in enumerate(self.counts):
            lines += [f"{n},{v},{c}" for v, c in lvl]
        return "\n".join(lines) + "\n"


def _profile_rules(g: BoundedTypeHomeo, horizon: int) -> SingularityProfile:
    D = g.diagram
    counts = []
    for n in range(horizon + 1):
        per_vertex = dict.fromkeys(range(D.level_size(n)), 0)
        for p in D.paths(n):
            if not g.is_prefix_replacement_on(p):
                per_vertex[D.target(p)] += 1
        counts.append(tuple(sorted(per_vertex.items())))
    sup = max((c for lvl in counts for _, c in lvl), default=0)
    verdict = f"bounded_with({sup}, horizon={horizon}, singularities=0)"
    return SingularityProfile(horizon, tuple(counts), None, (), verdict)


def singular_rays(g: TreeAutomorphism) -> tuple[Ray, ...] | None:
    """Rays along which no section of ``g`` is trivial; None when ``g`` is not structurally bounded."""
    if bounded_check(g).kind != "bounded_with":
        return None
    n = g.num_states
    trivial = [g.state_is_trivial(s) for s in range(n)]
    on_cycle = {}
    for s in range(n):
        if trivial[s]:
            continue
        # follow nontrivial single steps back to s
        stack = [(s, ())]
        seen = set()
        while stack:
            t, word = stack.pop()
            for x, u in enumerate(g.sections[t]):
                if trivial[u]:
                    continue
                if u == s:
                    on_cycle[s] = word + (x,)
                    stack = []
                    break
                if u not in seen:
                    seen.add(u)
                    stack.append((u, word + (x,)))
    out = set()
    stack = [(0, ())]
    while stack:
        s, word = stack.pop()
        if trivial[s]:
            continue
        if s in on_cycle:
            out.add(Ray(word, on_cycle[s]))
            continue
        for x, u in enumerate(g.sections[s]):
            if len(word) < n:
                stack.append((u, word + (x,)))
    return tuple(sorted(out, key=lambda r: (len(r.preperiod), r.preperiod, r.period)))


def singularity_profile(g: BoundedTypeHomeo | TreeAutomorphism, horizon: int) -> SingularityProfile:
    """Per-vertex counts of paths on whose cylinder ``g`` is not a prefix replacement.

    For a tree automorphism (stationary one-vertex diagram) the restriction to
    ``C_w`` is a prefix replacement exactly when the section at ``w`` is
    trivial, so the counts are computed from sections; the activity is
    reported alongside and never assumed equal.
    """
    if isinstance(g, BoundedTypeHomeo):
        return _profile_rules(g, horizon)
    tree = g.tree
    counts = []
    for n in range(horizon + 1):
        c = sum(1 for w in tree.vertices(n) if not section(g, w).is_trivial)
        counts.append(((0, c),))
    acts = tuple(activity(g, n) for n in range(horizon + 1))
    rays = singular_rays(g)
    sup = max(c for lvl in counts for _, c in lvl)
    if rays is None:
        verdict = f"inconclusive(horizon={horizon})"
    else:
        verdict = f"bounded_with({sup}, horizon={horizon}, singularities={len(rays)})"
    return SingularityProfile(horizon, tuple(counts), acts, rays, verdict)


@dataclass(frozen=True)
class TreeCorrespondence:
    diagram: BratteliDiagram
    tree: TreeSpec

    def to_homeo(self, g: TreeAutomorphism, depth: int | None = None) -> BoundedTypeHomeo:
        """Rule list for a finitary automorphism; ``depth`` defaults to where all sections become trivial."""
        if depth is None:
            depth = 0
            while any(not section(g, w).is_trivial for w in self.tree.vertices(depth)):
                depth += 1
                if depth > 64:
                    raise DiagramError("automorphism is not finitary")
        for w in self.tree.vertices(depth):
            if not section(g, w).is_trivial:
                raise DiagramError(f"not finitary at depth {depth}")
        rules = tuple((w, act_vertex(g, w)) for w in self.tree.vertices(depth))
        return BoundedTypeHomeo(self.diagram, rules)

    def to_automorphism(self, h: BoundedTypeHomeo) -> TreeAutomorphism:
        depth = h.depth
        labels: dict[Vertex, tuple[int, ...]] = {}
        for n in range(depth):
            for u in self.tree.vertices(n):
                perm = []
                for x in range(self.tree.degree(n)):
                    ext = self.diagram.extensions(u + (x,), depth)[0]
                    perm.append(h(ext)[n])
                if perm != list(range(len(perm))):
                    labels[u] = tuple(perm)
        return TreeAutomorphism.finitary(self.tree, labels)


def tree_correspondence(diagram: BratteliDiagram) -> TreeCorrespondence:
    if not diagram.is_tree_like:
        raise DiagramError("tree correspondence needs one vertex per level")
    degrees = tuple(len(es) for es in diagram.edges)
    return TreeCorrespondence(diagram, TreeSpec(degrees, diagram.tail_start, degenerate=min(degrees) < 2))


def actions_agree(corr: TreeCorrespondence, g: TreeAutomorphism, h: BoundedTypeHomeo, depth: int) -> bool:
    """Brute-force comparison on all paths of length ``depth`` (>= rule depth)."""
    return all(act_vertex(g, w) == h(w) for w in corr.tree.vertices(depth))


def ray_singular(g: TreeAutomorphism, ray: Ray) -> bool:
    """No section along ``ray`` is trivial."""
    return not any(g.state_is_trivial(s) for s in ray_states(g, ray))
