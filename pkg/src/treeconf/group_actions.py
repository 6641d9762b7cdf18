"""Groups given by generating automorphisms and the graphs of their actions.

All graphs share :class:`LabeledGraph`.  Breadth-first construction visits
labels in lexicographic order and numbers vertices in discovery order, so the
same inputs always give the same graph.  A vertex is *complete* when its full
edge star is known; growth and embedding tests only use centres whose balls
avoid incomplete vertices.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Sequence

import numpy as np

from .automorphisms import (
    TreeAutomorphism,
    act_ray,
    act_vertex,
    compose,
    germ_trivial_at,
    invert,
)
from .words_tree import Ray, TreeSpec, Vertex, vertex_str

DEFAULT_LEVEL_CAP = 2**18


class LevelTooLarge(ValueError):
    pass


class NoAdmissibleCenter(ValueError):
    pass


class EvidenceInsufficient(ValueError):
    pass


def inverse_label(label: str) -> str:
    return label[:-3] if label.endswith("^-1") else label + "^-1"


class GroupSpec:
    """A finitely generated group of tree automorphisms.

    ``symmetric`` adds ``x^-1`` for every generator that is not an involution.
    Ball enumerations are cached; the group itself never changes after
    construction.
    """

    def __init__(self, name: str, tree: TreeSpec, generators: dict[str, TreeAutomorphism], symmetric: bool = True):
        self.name = name
        self.tree = tree
        self.generators = dict(generators)
        self.symmetric = symmetric
        for label, g in self.generators.items():
            if g.tree != tree:
                raise ValueError(f"generator {label} acts on another tree")
        labels: dict[str, TreeAutomorphism] = dict(self.generators)
        if symmetric:
            for label, g in self.generators.items():
                inv = invert(g)
                if inv != g and inv not in labels.values():
                    labels[inverse_label(label)] = inv
        self.labels: tuple[str, ...] = tuple(sorted(labels))
        self.elements_by_label = {label: labels[label] for label in self.labels}
        self._balls: list[tuple[TreeAutomorphism, tuple[str, ...]]] | None = None
        self._ball_radius = -1
        self._ball_index: dict[TreeAutomorphism, int] = {}
        self._sphere_starts: list[int] = []

    def __repr__(self):
        return f"GroupSpec({self.name!r}, generators={list(self.generators)})"

    @property
    def identity(self) -> TreeAutomorphism:
        return TreeAutomorphism.identity(self.tree)

    def label_inverse(self, label: str) -> str:
        g = self.elements_by_label[label]
        inv = invert(g)
        for other in self.labels:
            if self.elements_by_label[other] == inv:
                return other
        raise KeyError(label)

    def evaluate(self, word: Sequence[str]) -> TreeAutomorphism:
        """Product ``w_1 w_2 ... w_k`` (the rightmost letter acts first)."""
        out = self.identity
        for label in word:
            if label not in self.elements_by_label:
                raise KeyError(f"unknown generator {label!r} in group {self.name}")
            out = compose(out, self.elements_by_label[label])
        return out

    def parse_word(self, text: str) -> tuple[str, ...]:
        text = text.strip()
        if text in ("", "1", "e", "id"):
            return ()
        if "*" in text or " " in text:
            tokens = [t for t in text.replace("*", " ").split() if t]
        elif text in self.elements_by_label:
            tokens = [text]
        else:
            tokens = []
            i = 0
            while i < len(text):
                for label in sorted(self.elements_by_label, key=len, reverse=True):
                    if text.startswith(label, i):
                        tokens.append(label)
                        i += len(label)
                        break
                else:
                    raise KeyError(f"cannot parse word {text!r}")
        for t in tokens:
            if t not in self.elements_by_label:
                raise KeyError(f"unknown generator {t!r}")
        return tuple(tokens)

    def element(self, word: str | Sequence[str]) -> TreeAutomorphism:
        if isinstance(word, str):
            word = self.parse_word(word)
        return self.evaluate(word)

    def ball(self, radius: int) -> list[tuple[TreeAutomorphism, tuple[str, ...]]]:
        """Elements of word length <= ``radius`` with shortlex-first words, in BFS order."""
        if radius > self._ball_radius:
            self._grow_ball(radius)
        end = self._sphere_starts[radius + 1] if radius + 1 < len(self._sphere_starts) else len(self._balls)
        return self._balls[:end]

    def sphere_start(self, radius: int) -> int:
        self.ball(radius)
        return self._sphere_starts[radius]

    def word_length(self, g: TreeAutomorphism, max_radius: int) -> int | None:
        self.ball(max_radius)
        idx = self._ball_index.get(g)
        if idx is None:
            return None
        return len(self._balls[idx][1])

    def _grow_ball(self, radius: int):
        if self._balls is None:
            e = self.identity
            self._balls = [(e, ())]
            self._ball_index = {e: 0}
            self._sphere_starts = [0]
            self._ball_radius = 0
        while self._ball_radius < radius:
            start = self._sphere_starts[self._ball_radius]
            end = len(self._balls)
            self._sphere_starts.append(end)
            for i in range(start, end):
                g, word = self._balls[i]
                for label in self.labels:
                    h = compose(self.elements_by_label[label], g)
                    if h not in self._ball_index:
                        self._ball_index[h] = len(self._balls)
                        self._balls.append((h, (label,) + word))
            self._ball_radius += 1


def word_str(word: Sequence[str]) -> str:
    if not word:
        return "1"
    if all(len(w) == 1 for w in word):
        return "".join(word)
    return "*".join(word)


@dataclass
class LabeledGraph:
    """Vertices with payloads and label-deterministic outgoing edges."""

    labels: tuple[str, ...]
    payloads: list = field(default_factory=list)
    edges: list[dict[str, int]] = field(default_factory=list)
    complete: list[bool] = field(default_factory=list)
    base: int | None = None
    radius: int | None = None  # None: every vertex complete
    kind: str = "graph"
    name: str = ""

    def __len__(self):
        return len(self.payloads)

    def add_vertex(self, payload, complete: bool = False) -> int:
        self.payloads.append(payload)
        self.edges.append({})
        self.complete.append(complete)
        return len(self.payloads) - 1

    def add_edge(self, u: int, label: str, v: int):
        old = self.edges[u].get(label)
        if old is not None and old != v:
            raise ValueError(f"label {label} not deterministic at vertex {u}")
        self.edges[u][label] = v

    def edge_list(self) -> list[tuple[int, str, int]]:
        return [(u, label, v) for u in range(len(self)) for label, v in sorted(self.edges[u].items())]

    def neighbors(self, u: int) -> Iterable[int]:
        return self.edges[u].values()

    def undirected(self) -> list[set[int]]:
        adj = [set() for _ in range(len(self))]
        for u, _, v in self.edge_list():
            if u != v:
                adj[u].add(v)
                adj[v].add(u)
        return adj

    def distances_from(self, source: int, limit: int | None = None) -> dict[int, int]:
        dist = {source: 0}
        queue = deque([source])
        while queue:
            u = queue.popleft()
            if limit is not None and dist[u] >= limit:
                continue
            for v in self.edges[u].values():
                if v not in dist:
                    dist[v] = dist[u] + 1
                    queue.append(v)
        return dist

    def known_radius(self) -> list[float]:
        """For every vertex, the largest r such that its r-ball is fully known."""
        adj = self.undirected()
        inf = math.inf
        rho = [inf] * len(self)
        queue = deque()
        for v, ok in enumerate(self.complete):
            if not ok:
                rho[v] = 0
                queue.append(v)
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                if rho[v] == inf:
                    rho[v] = rho[u] + 1
                    queue.append(v)
        return rho

    def ball(self, center: int, r: int) -> set[int]:
        return set(self.distances_from(center, r))

    def find(self, payload: Hashable) -> int | None:
        index = getattr(self, "_index", None)
        if index is None or len(index) != len(self.payloads):
            index = {p: i for i, p in enumerate(self.payloads)}
            self._index = index
        return index.get(payload)


def _bfs_graph(
    labels: Sequence[str],
    start,
    step: Callable[[str, object], object],
    radius: int | None,
    kind: str,
    name: str,
    key: Callable[[object], Hashable] = lambda x: x,
) -> LabeledGraph:
    g = LabeledGraph(tuple(labels), kind=kind, name=name, radius=radius)
    index: dict[Hashable, int] = {}
    dist = []

    def add(p, d):
        i = g.add_vertex(p)
        index[key(p)] = i
        dist.append(d)
        return i

    g.base = add(start, 0)
    i = 0
    while i < len(g):
        p = g.payloads[i]
        expand = radius is None or dist[i] < radius
        for label in labels:
            q = step(label, p)
            j = index.get(key(q))
            if j is None:
                if not expand:
                    continue
                j = add(q, dist[i] + 1)
            g.add_edge(i, label, j)
        g.complete[i] = expand
        i += 1
    return g


def cayley_ball(G: GroupSpec, R: int) -> LabeledGraph:
    """Ball of radius ``R`` in the Cayley graph; edges ``g -> s g``."""
    elements = G.ball(R)
    g = LabeledGraph(G.labels, kind="cayley", name=G.name, radius=R)
    index = {}
    for k, (el, word) in enumerate(elements):
        index[el] = g.add_vertex(el, complete=len(word) < R)
    for k, (el, word) in enumerate(elements):
        for label in G.labels:
            h = compose(G.elements_by_label[label], el)
            j = index.get(h)
            if j is not None:
                g.add_edge(k, label, j)
    g.base = 0
    g.words = [w for _, w in elements]
    by_word = {w: k for k, w in enumerate(g.words)}
    g.parents = [by_word[w[1:]] if w else 0 for w in g.words]
    return g


def level_schreier(G: GroupSpec, n: int, cap: int = DEFAULT_LEVEL_CAP) -> LabeledGraph:
    """Action graph on ``L(n)``; BFS from ``0^n``, then leftover vertices lexicographically."""
    size = G.tree.level_size(n)
    if size > cap:
        raise LevelTooLarge(f"level {n} has {size} vertices (cap {cap})")
    g = LabeledGraph(G.labels, kind="level", name=f"{G.name}:L({n})", radius=None)
    index: dict[Vertex, int] = {}
    gens = [(label, G.elements_by_label[label]) for label in G.labels]
    for seed in G.tree.vertices(n):
        if seed in index:
            continue
        index[seed] = g.add_vertex(seed, complete=True)
        queue = deque([seed])
        while queue:
            v = queue.popleft()
            for label, s in gens:
                w = act_vertex(s, v)
                if w not in index:
                    index[w] = g.add_vertex(w, complete=True)
                    queue.append(w)
                g.add_edge(index[v], label, index[w])
    g.base = 0
    return g


def orbital_ball(G: GroupSpec, x: Ray, R: int) -> LabeledGraph:
    """Ball of radius ``R`` around ``x`` in its orbital graph."""
    x.check(G.tree)
    return _bfs_graph(
        G.labels, x, lambda label, p: act_ray(G.elements_by_label[label], p), R, "orbital", f"{G.name}:{x}"
    )


@dataclass
class GermBall:
    graph: LabeledGraph
    orbital: LabeledGraph
    projection: list[int]

    def fibers(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {}
        for germ, orb in enumerate(self.projection):
            out.setdefault(orb, []).append(germ)
        return out


def germ_ball(G: GroupSpec, x: Ray, R: int) -> GermBall:
    """Ball of radius ``R`` in the graph of germs at ``x`` with its projection to the orbital ball.

    Vertices are cosets ``g G_x^0`` represented by an element; two
    representatives give the same vertex when ``u^-1 v`` has trivial germ at ``x``.
    """
    x.check(G.tree)
    graph = LabeledGraph(G.labels, kind="germ", name=f"{G.name}:germ:{x}", radius=R)
    reps: list[TreeAutomorphism] = []
    points: list[Ray] = []
    by_point: dict[Ray, list[int]] = {}
    dist: list[int] = []

    def lookup(h: TreeAutomorphism, y: Ray) -> int | None:
        for j in by_point.get(y, ()):
            if germ_trivial_at(compose(invert(reps[j]), h), x):
                return j
        return None

    def add(h, y, d):
        j = graph.add_vertex((y, len(reps)))
        reps.append(h)
        points.append(y)
        by_point.setdefault(y, []).append(j)
        dist.append(d)
        return j

    graph.base = add(G.identity, x, 0)
    i = 0
    while i < len(graph):
        expand = dist[i] < R
        for label in G.labels:
            s = G.elements_by_label[label]
            h = compose(s, reps[i])
            y = act_ray(s, points[i])
            j = lookup(h, y)
            if j is None:
                if not expand:
                    continue
                j = add(h, y, dist[i] + 1)
            graph.add_edge(i, label, j)
        graph.complete[i] = expand
        i += 1
    graph.representatives = reps
    orbital = orbital_ball(G, x, R)
    projection = []
    for y in points:
        k = orbital.find(y)
        if k is None:
            raise AssertionError(f"germ vertex over {y} has no orbital image")
        projection.append(k)
    return GermBall(graph, orbital, projection)


@dataclass(frozen=True)
class FiberProfile:
    """Fiber sizes of the germ projection, grouped by orbital distance from the base."""

    sizes_by_distance: dict[int, tuple[int, ...]]
    base_fiber: int
    settle_radius: int
    radius: int

    @property
    def constant(self) -> bool:
        """Every fiber over a vertex at distance <= ``radius - settle_radius`` has the base size."""
        window = self.radius - self.settle_radius
        return all(sizes == (self.base_fiber,) for d, sizes in self.sizes_by_distance.items() if d <= window)

    def __str__(self):
        verdict = "constant" if self.constant else "varying"
        return f"fiber {self.base_fiber} {verdict} (R={self.radius}, settled at {self.settle_radius})"


def fiber_profile(G: GroupSpec, x: Ray, R: int) -> FiberProfile:
    """Fiber sizes of ``germ_ball(G, x, R)``; the base fiber settles at the least radius where it stops growing."""
    germ = germ_ball(G, x, R)
    dist = germ.orbital.distances_from(germ.orbital.base)
    grouped: dict[int, set[int]] = {}
    for v, fiber in germ.fibers().items():
        grouped.setdefault(dist[v], set()).add(len(fiber))
    base = len(germ.fibers()[germ.orbital.base])
    settle = R
    for r in range(R + 1):
        if len(germ_ball(G, x, r).fibers()[0]) == base:
            settle = r
            break
    return FiberProfile({d: tuple(sorted(v)) for d, v in sorted(grouped.items())}, base, settle, R)


def verify_covering(germ: GermBall) -> list[str]:
    """Covering property checks; returns a list of violations (empty when it is a covering)."""
    problems = []
    gg, orb, proj = germ.graph, germ.orbital, germ.projection
    if set(proj) != set(range(len(orb))):
        problems.append("projection not surjective")
    for u, label, v in gg.edge_list():
        if orb.edges[proj[u]].get(label) != proj[v]:
            problems.append(f"edge ({u},{label},{v}) not preserved")
    for u in range(len(gg)):
        if not gg.complete[u]:
            continue
        star = {label: proj[v] for label, v in gg.edges[u].items()}
        if star != orb.edges[proj[u]]:
            problems.append(f"edge star at {u} not bijective")
    return problems


@dataclass(frozen=True)
class GrowthRow:
    radius: int
    max_ball: int
    min_ball: int
    base_ball: int | None


@dataclass(frozen=True)
class GrowthTable:
    rows: tuple[GrowthRow, ...]

    def max_ball(self) -> list[int]:
        return [r.max_ball for r in self.rows]

    def to_csv(self) -> str:
        lines = ["radius,max_ball,min_ball,base_ball"]
        for r in self.rows:
            base = "" if r.base_ball is None else str(r.base_ball)
            lines.append(f"{r.radius},{r.max_ball},{r.min_ball},{base}")
        return "\n".join(lines) + "\n"


def graph_growth(graph: LabeledGraph, up_to_R: int) -> GrowthTable:
    """Ball sizes over admissible centres (centres whose ball is fully known)."""
    rho = graph.known_radius()
    sizes: dict[int, list[int]] = {r: [] for r in range(up_to_R + 1)}
    base_sizes: dict[int, int] = {}
    for v in range(len(graph)):
        reach = min(rho[v], up_to_R)
        if reach < 0:
            continue
        dist = graph.distances_from(v, int(reach))
        counts = [0] * (int(reach) + 1)
        for d in dist.values():
            counts[d] += 1
        total = 0
        for r in range(int(reach) + 1):
            total += counts[r]
            sizes[r].append(total)
            if v == graph.base:
                base_sizes[r] = total
    rows = []
    for r in range(up_to_R + 1):
        if not sizes[r]:
            raise NoAdmissibleCenter(f"no vertex has a fully known ball of radius {r}")
        rows.append(GrowthRow(r, max(sizes[r]), min(sizes[r]), base_sizes.get(r)))
    return GrowthTable(tuple(rows))


@dataclass(frozen=True)
class EmbeddingResult:
    embeds: bool
    radius: int
    center: int | None = None
    centers_checked: int = 0
    cayley_size: int = 0
    largest_schreier_ball: int = 0

    def __str__(self):
        if self.embeds:
            return f"embeds_at(vertex={self.center}, R={self.radius})"
        return f"no_embedding(R={self.radius}, centers={self.centers_checked})"


def _ball_map(cayley: LabeledGraph, H: LabeledGraph, x: int) -> dict[int, int] | None:
    """Map each Cayley-ball vertex g to g·x by following its word; None if an edge is missing."""
    phi = {0: x}
    for k, word in enumerate(cayley.words):
        if k == 0:
            continue
        # the BFS word of g is label·(word of its parent); parent precedes g
        y = H.edges[phi[cayley.parents[k]]].get(word[0])
        if y is None:
            return None
        phi[k] = y
    return phi


def ball_embedding_test(G: GroupSpec, H_graph: LabeledGraph, R: int) -> EmbeddingResult:
    """Search an admissible centre whose labelled R-ball is isomorphic to the Cayley R-ball."""
    cay = cayley_ball(G, R)
    rho = H_graph.known_radius()
    checked = 0
    largest = 0
    for x in range(len(H_graph)):
        if rho[x] < R:
            continue
        checked += 1
        ball = H_graph.ball(x, R)
        largest = max(largest, len(ball))
        if len(ball) != len(cay):
            continue
        phi = _ball_map(cay, H_graph, x)
        if phi is None or len(set(phi.values())) != len(cay):
            continue
        if _verify_isomorphism(cay, H_graph, phi, ball):
            return EmbeddingResult(True, R, x, checked, len(cay), largest)
    return EmbeddingResult(False, R, None, checked, len(cay), largest)


def _verify_isomorphism(cay: LabeledGraph, H: LabeledGraph, phi: dict[int, int], ball: set[int]) -> bool:
    inv = {v: k for k, v in phi.items()}
    for k, label, j in cay.edge_list():
        if H.edges[phi[k]].get(label) != phi[j]:
            return False
    for y in ball:
        for label, z in H.edges[y].items():
            if z in ball and cay.edges[inv[y]].get(label) != inv[z]:
                return False
    return True


# -- cut-sets and dimension bounds ------------------------------------------------


def path_graph(n: int) -> LabeledGraph:
    g = LabeledGraph(("l", "r"), kind="path", name=f"path{n}")
    for i in range(n):
        g.add_vertex(i, complete=True)
    for i in range(n):
        g.add_edge(i, "r", min(i + 1, n - 1))
        g.add_edge(i, "l", max(i - 1, 0))
    g.base = 0
    return g


def grid_graph(w: int, h: int) -> LabeledGraph:
    g = LabeledGraph(("d", "l", "r", "u"), kind="grid", name=f"grid{w}x{h}")
    for y in range(h):
        for x in range(w):
            g.add_vertex((x, y), complete=True)
    for y in range(h):
        for x in range(w):
            i = y * w + x
            g.add_edge(i, "r", y * w + min(x + 1, w - 1))
            g.add_edge(i, "l", y * w + max(x - 1, 0))
            g.add_edge(i, "u", min(y + 1, h - 1) * w + x)
            g.add_edge(i, "d", max(y - 1, 0) * w + x)
    g.base = (h // 2) * w + w // 2
    return g


@dataclass(frozen=True)
class CutSetCertificate:
    """Nested sets ``V_k`` = first ``cuts[k]`` vertices of ``order``, each with ``|∂V_k| <= bound``."""

    order: tuple[int, ...]
    cuts: tuple[int, ...]
    boundaries: tuple[int, ...]
    bound: int

    def sets(self) -> list[set[int]]:
        return [set(self.order[:c]) for c in self.cuts]

    def __len__(self):
        return len(self.cuts)


def vertex_boundary(adj: Sequence[set[int]], vs: set[int]) -> set[int]:
    return {w for v in vs for w in adj[v] if w not in vs}


def _peripheral(adj: Sequence[set[int]], start: int) -> int:
    dist = {start: 0}
    queue = deque([start])
    last = start
    while queue:
        u = queue.popleft()
        last = u
        for v in sorted(adj[u]):
            if v not in dist:
                dist[v] = dist[u] + 1
                queue.append(v)
    return last


def cut_set_sequence(graph: LabeledGraph, bound: int, min_chain_length: int) -> CutSetCertificate | None:
    """Greedy search for an exhausting chain of vertex sets with boundary <= ``bound``.

    Growth adds, one at a time, the boundary vertex that keeps the new
    boundary smallest.  ``None`` is inconclusive.
    """
    adj = graph.undirected()
    interior = {v for v in range(len(graph)) if graph.complete[v]}
    if not interior:
        return None
    starts = []
    for s in (graph.base, _peripheral(adj, graph.base or 0), _peripheral(adj, _peripheral(adj, graph.base or 0))):
        if s is not None and s not in starts:
            starts.append(s)
    for s in starts:
        cert = _grow_chain(adj, interior, s, bound)
        if cert is not None and len(cert) >= min_chain_length:
            return cert
    return None


def _grow_chain(adj, interior, start, bound):
    inside = {start}
    order = [start]
    boundary = {w for w in adj[start]}
    cuts, sizes = [], []
    if len(boundary) <= bound:
        cuts.append(1)
        sizes.append(len(boundary))
    while not interior <= inside:
        if not boundary:
            return None
        best = None
        for y in sorted(boundary):
            new = len(boundary) - 1 + sum(1 for z in adj[y] if z not in inside and z not in boundary)
            if best is None or new < best[0]:
                best = (new, y)
        _, y = best
        inside.add(y)
        order.append(y)
        boundary.discard(y)
        boundary.update(z for z in adj[y] if z not in inside)
        if len(boundary) <= bound:
            cuts.append(len(order))
            sizes.append(len(boundary))
    if not cuts or cuts[-1] != len(order):
        return None
    return CutSetCertificate(tuple(order), tuple(cuts), tuple(sizes), bound)


@dataclass(frozen=True)
class LeudBound:
    bound: int
    rule: str
    detail: dict


FIT_RESIDUAL_THRESHOLD = 0.15
MAX_FIT_DEGREE = 6


def fit_growth_degree(table: GrowthTable, threshold: float = FIT_RESIDUAL_THRESHOLD) -> dict:
    """Integer degree minimizing the log-log residual over the dyadic window ``[R/4, R]``.

    The intercept is fitted per degree; residual is the RMS deviation in
    natural log.  The free least-squares slope is reported alongside.
    """
    R = table.rows[-1].radius
    lo = max(1, R // 4)
    window = [row for row in table.rows if lo <= row.radius <= R]
    if len(window) < 3:
        raise EvidenceInsufficient(f"window [{lo}, {R}] has fewer than 3 radii")
    x = np.log([row.radius for row in window])
    y = np.log([row.max_ball for row in window])
    slope = float(np.polyfit(x, y, 1)[0])
    best = None
    for d in range(MAX_FIT_DEGREE + 1):
        resid = y - d * x
        res = float(np.sqrt(np.mean((resid - resid.mean()) ** 2)))
        if best is None or res < best[1]:
            best = (d, res)
    degree, residual = best
    return {"degree": degree, "residual": residual, "slope": slope, "window": [lo, R], "threshold": threshold}


def leud_upper(evidence: GrowthTable | CutSetCertificate, threshold: float = FIT_RESIDUAL_THRESHOLD) -> LeudBound:
    if isinstance(evidence, CutSetCertificate):
        return LeudBound(
            1, "cut_sets", {"chain_length": len(evidence), "max_boundary": max(evidence.boundaries), "bound": evidence.bound}
        )
    fit = fit_growth_degree(evidence, threshold)
    if fit["residual"] > threshold:
        raise EvidenceInsufficient(f"fit residual {fit['residual']:.4g} above threshold {threshold}")
    return LeudBound(fit["degree"], "growth_fit", fit)


def vertex_label(payload) -> str:
    if isinstance(payload, tuple) and payload and isinstance(payload[0], Ray):
        return f"{payload[0]}#{payload[1]}"
    if isinstance(payload, tuple) and all(isinstance(x, int) for x in payload):
        return vertex_str(payload)
    if isinstance(payload, TreeAutomorphism):
        return f"g{payload.num_states}"
    return str(payload)
