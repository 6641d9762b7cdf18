"""Finite-state automorphisms of trees of words.

Every :class:`TreeAutomorphism` is kept in a canonical form: states reachable
from the initial state only, Moore-minimized, and renumbered in breadth-first
order (letters in increasing order).  Two automorphisms of the same tree are
equal exactly when their canonical tables coincide, so ``==`` and ``hash`` are
sound and exact.  :func:`equals` is the independent route through a
triviality scan of ``g h^-1``.

States carry a level class of the :class:`TreeSpec` so that non-regular
schedules work: a state of class ``c`` permutes ``class_degree(c)`` letters and
its sections live in class ``next_class(c)``.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .words_tree import (
    ROOT,
    Antichain,
    Ray,
    TreeError,
    TreeSpec,
    Vertex,
    complement_antichain,
)

DEFAULT_STATE_BUDGET = 50_000


class StateBudgetExceeded(RuntimeError):
    pass


class NotContractingUpTo(RuntimeError):
    def __init__(self, max_states: int, reached: int):
        super().__init__(f"nucleus candidate grew to {reached} elements (budget {max_states}); inconclusive")
        self.max_states = max_states
        self.reached = reached


def _identity_perm(d: int) -> tuple[int, ...]:
    return tuple(range(d))


def _inverse_perm(p: Sequence[int]) -> tuple[int, ...]:
    inv = [0] * len(p)
    for i, x in enumerate(p):
        inv[x] = i
    return tuple(inv)


def _canonical(tree, levels, perms, secs, init=0):
    """Reachable restriction + Moore minimization + BFS renumbering."""
    index = {init: 0}
    order = [init]
    i = 0
    while i < len(order):
        for t in secs[order[i]]:
            if t not in index:
                index[t] = len(order)
                order.append(t)
        i += 1
    n = len(order)
    lv = [levels[s] for s in order]
    pm = [tuple(perms[s]) for s in order]
    sc = [tuple(index[t] for t in secs[s]) for s in order]

    keys: dict = {}
    block = [keys.setdefault((lv[k], pm[k]), len(keys)) for k in range(n)]
    nblocks = len(keys)
    while True:
        keys = {}
        new = [keys.setdefault((block[k], tuple(block[t] for t in sc[k])), len(keys)) for k in range(n)]
        if len(keys) == nblocks:
            break
        block, nblocks = new, len(keys)

    rep: dict[int, int] = {}
    for k in range(n):
        rep.setdefault(block[k], k)
    renum = {block[0]: 0}
    border = [block[0]]
    i = 0
    while i < len(border):
        k = rep[border[i]]
        for t in sc[k]:
            b = block[t]
            if b not in renum:
                renum[b] = len(border)
                border.append(b)
        i += 1
    out_lv, out_pm, out_sc = [], [], []
    for b in border:
        k = rep[b]
        out_lv.append(lv[k])
        out_pm.append(pm[k])
        out_sc.append(tuple(renum[block[t]] for t in sc[k]))
    return TreeAutomorphism(tree, tuple(out_lv), tuple(out_pm), tuple(out_sc))


@dataclass(frozen=True, eq=False)
class TreeAutomorphism:
    """Canonical finite-state automorphism; state 0 is the initial state."""

    tree: TreeSpec
    levels: tuple[int, ...]
    perms: tuple[tuple[int, ...], ...]
    sections: tuple[tuple[int, ...], ...]
    _trivial: frozenset = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_trivial", frozenset(_trivial_states(self.perms, self.sections)))

    def _key(self):
        return (self.tree, self.levels, self.perms, self.sections)

    def __eq__(self, other):
        if not isinstance(other, TreeAutomorphism):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        return f"TreeAutomorphism(states={self.num_states}, level={self.level})"

    @property
    def num_states(self) -> int:
        return len(self.perms)

    @property
    def level(self) -> int:
        """Level class of the tree this automorphism acts on."""
        return self.levels[0]

    def state_is_trivial(self, s: int) -> bool:
        return s in self._trivial

    @property
    def is_trivial(self) -> bool:
        return 0 in self._trivial

    def __mul__(self, other: TreeAutomorphism) -> TreeAutomorphism:
        return compose(self, other)

    def __invert__(self) -> TreeAutomorphism:
        return invert(self)

    def from_state(self, s: int) -> TreeAutomorphism:
        if s == 0:
            return self
        return _canonical(self.tree, self.levels, self.perms, self.sections, s)

    # -- construction -------------------------------------------------

    @classmethod
    def identity(cls, tree: TreeSpec, level: int = 0) -> TreeAutomorphism:
        classes = [level]
        while tree.next_class(classes[-1]) not in classes:
            classes.append(tree.next_class(classes[-1]))
        pos = {c: i for i, c in enumerate(classes)}
        perms = [_identity_perm(tree.class_degree(c)) for c in classes]
        secs = [(pos[tree.next_class(c)],) * tree.class_degree(c) for c in classes]
        return _canonical(tree, classes, perms, secs)

    @classmethod
    def from_table(
        cls,
        tree: TreeSpec,
        table: Mapping[str, tuple[int, Sequence[int], Sequence[str]]],
        initial: str,
    ) -> TreeAutomorphism:
        """Build from named states ``name -> (level_class, perm, section names)``.

        The name ``"e"`` (or ``"1"``) is the identity.  ``"x^-1"`` refers to the
        inverse of state ``x`` and is resolved automatically.
        """
        states: dict[str, int] = {}
        levels: list[int] = []
        perms: list[tuple[int, ...]] = []
        secs: list[list[int]] = []
        identity_ids: dict[int, int] = {}

        def ident(level: int) -> int:
            if level not in identity_ids:
                sid = len(perms)
                identity_ids[level] = sid
                levels.append(level)
                perms.append(_identity_perm(tree.class_degree(level)))
                secs.append([])
                secs[sid] = [ident(tree.next_class(level))] * tree.class_degree(level)
            return identity_ids[level]

        def resolve(name: str, level: int) -> int:
            if name in ("e", "1", "id"):
                return ident(level)
            key = name
            if key in states:
                if levels[states[key]] != level:
                    raise TreeError(f"state {name} used on level class {level} but declared on {levels[states[key]]}")
                return states[key]
            inverse = name.endswith("^-1")
            base = name[:-3] if inverse else name
            if base not in table:
                raise TreeError(f"unknown state {base!r}")
            lvl, perm, names = table[base]
            if lvl != level:
                raise TreeError(f"state {base} declared on level class {lvl}, referenced from {level}")
            d = tree.class_degree(lvl)
            perm = tuple(perm)
            if sorted(perm) != list(range(d)) or len(names) != d:
                raise TreeError(f"state {base}: bad permutation or section count for degree {d}")
            sid = len(perms)
            states[key] = sid
            levels.append(lvl)
            secs.append([])
            nxt = tree.next_class(lvl)
            if inverse:
                pinv = _inverse_perm(perm)
                perms.append(pinv)
                secs[sid] = [resolve(_inv_name(names[pinv[y]]), nxt) for y in range(d)]
            else:
                perms.append(perm)
                secs[sid] = [resolve(n, nxt) for n in names]
            return sid

        init = resolve(initial, table[initial.removesuffix("^-1")][0] if initial not in ("e", "1", "id") else 0)
        return _canonical(tree, levels, perms, secs, init)

    @classmethod
    def finitary(cls, tree: TreeSpec, labels: Mapping[Vertex, Sequence[int]], level: int = 0) -> TreeAutomorphism:
        """Automorphism with the given vertex permutations and trivial sections below them."""
        labels = {tuple(v): tuple(p) for v, p in labels.items()}
        depth = max((len(v) for v in labels), default=0) + 1
        ident = cls.identity(tree, level)
        levels, perms, secs = list(ident.levels), list(ident.perms), [list(r) for r in ident.sections]
        id_state = {}
        for k, c in enumerate(ident.levels):
            id_state.setdefault(c, k)

        def build(v: Vertex, c: int) -> int:
            sid = len(perms)
            levels.append(c)
            perms.append(labels.get(v, _identity_perm(tree.class_degree(c))))
            secs.append([])
            nxt = tree.next_class(c)
            if len(v) + 1 < depth:
                secs[sid] = [build(v + (x,), nxt) for x in range(tree.class_degree(c))]
            else:
                secs[sid] = [id_state[nxt]] * tree.class_degree(c)
            return sid

        root = build(ROOT, level)
        return _canonical(tree, levels, perms, secs, root)

    @classmethod
    def placed(cls, h: TreeAutomorphism, v: Vertex, level: int = 0) -> TreeAutomorphism:
        """The automorphism acting as ``h`` on the subtree at ``v`` and trivially elsewhere."""
        tree = h.tree
        v = tuple(v)
        c = level
        classes = []
        for _ in v:
            classes.append(c)
            c = tree.next_class(c)
        if h.level != c:
            raise TreeError("placed element lives on the wrong level class")
        ident = cls.identity(tree, level)
        n_path = len(v)
        h_off = n_path
        id_off = h_off + h.num_states
        levels = list(classes) + list(h.levels) + list(ident.levels)
        perms = [_identity_perm(tree.class_degree(k)) for k in classes] + list(h.perms) + list(ident.perms)
        secs: list[list[int]] = []
        id_state = {}
        for k, lv in enumerate(ident.levels):
            id_state.setdefault(lv, id_off + k)
        for i, k in enumerate(classes):
            nxt = tree.next_class(k)
            row = [id_state[nxt]] * tree.class_degree(k)
            row[v[i]] = i + 1 if i + 1 < n_path else h_off
            secs.append(row)
        secs += [[h_off + t for t in row] for row in h.sections]
        secs += [[id_off + t for t in row] for row in ident.sections]
        return _canonical(tree, levels, perms, secs)

    @classmethod
    def rooted(cls, tree: TreeSpec, perm: Sequence[int], level: int = 0) -> TreeAutomorphism:
        return cls.finitary(tree, {ROOT: tuple(perm)}, level)

    # -- serialization --------------------------------------------------

    def to_json(self) -> dict:
        return {
            "states": [
                {"level": lv, "perm": list(p), "sections": list(s)}
                for lv, p, s in zip(self.levels, self.perms, self.sections)
            ],
            "initial": 0,
        }

    @classmethod
    def from_json(cls, tree: TreeSpec, data: dict) -> TreeAutomorphism:
        st = data["states"]
        return _canonical(
            tree,
            [s.get("level", 0) for s in st],
            [tuple(s["perm"]) for s in st],
            [tuple(s["sections"]) for s in st],
            data.get("initial", 0),
        )

    def fingerprint(self, depth: int = 4) -> int:
        """Cheap negative filter: hash of the depth-4 portrait."""
        return hash(portrait(self, depth).levels)


def _inv_name(name: str) -> str:
    if name in ("e", "1", "id"):
        return name
    return name[:-3] if name.endswith("^-1") else name + "^-1"


def _trivial_states(perms, secs) -> set[int]:
    n = len(perms)
    bad = {s for s in range(n) if any(i != x for i, x in enumerate(perms[s]))}
    # propagate nontriviality backwards along sections
    rev: list[list[int]] = [[] for _ in range(n)]
    for s in range(n):
        for t in secs[s]:
            rev[t].append(s)
    stack = list(bad)
    while stack:
        t = stack.pop()
        for s in rev[t]:
            if s not in bad:
                bad.add(s)
                stack.append(s)
    return set(range(n)) - bad


# -- group arithmetic -----------------------------------------------------


def _same_tree(g: TreeAutomorphism, h: TreeAutomorphism):
    if g.tree != h.tree or g.level != h.level:
        raise TreeError("automorphisms act on different trees")


def compose(g: TreeAutomorphism, h: TreeAutomorphism, budget: int = DEFAULT_STATE_BUDGET) -> TreeAutomorphism:
    """The product ``g∘h`` (apply ``h`` first)."""
    _same_tree(g, h)
    if h.is_trivial:
        return g
    if g.is_trivial:
        return h
    index = {(0, 0): 0}
    pairs = [(0, 0)]
    levels, perms, secs = [], [], []
    i = 0
    while i < len(pairs):
        x, y = pairs[i]
        pg, ph = g.perms[x], h.perms[y]
        sg, sh = g.sections[x], h.sections[y]
        levels.append(g.levels[x])
        perms.append(tuple(pg[j] for j in ph))
        row = []
        for j in range(len(ph)):
            pair = (sg[ph[j]], sh[j])
            k = index.get(pair)
            if k is None:
                k = index[pair] = len(pairs)
                pairs.append(pair)
                if len(pairs) > budget:
                    raise StateBudgetExceeded(f"product exceeded {budget} states")
            row.append(k)
        secs.append(row)
        i += 1
    return _canonical(g.tree, levels, perms, secs)


def invert(g: TreeAutomorphism) -> TreeAutomorphism:
    perms, secs = [], []
    for p, s in zip(g.perms, g.sections):
        pinv = _inverse_perm(p)
        perms.append(pinv)
        secs.append([s[pinv[y]] for y in range(len(p))])
    return _canonical(g.tree, g.levels, perms, secs)


def product(elements: Iterable[TreeAutomorphism], tree: TreeSpec | None = None) -> TreeAutomorphism:
    out = None
    for e in elements:
        out = e if out is None else compose(out, e)
    if out is None:
        if tree is None:
            raise ValueError("empty product needs a tree")
        return TreeAutomorphism.identity(tree)
    return out


def conjugate(g: TreeAutomorphism, by: TreeAutomorphism) -> TreeAutomorphism:
    """``by · g · by^-1``."""
    return compose(compose(by, g), invert(by))


def commutator(g: TreeAutomorphism, h: TreeAutomorphism) -> TreeAutomorphism:
    """``[g, h] = g h g^-1 h^-1``."""
    return compose(compose(g, h), compose(invert(g), invert(h)))


def power(g: TreeAutomorphism, n: int) -> TreeAutomorphism:
    base = g if n >= 0 else invert(g)
    out = TreeAutomorphism.identity(g.tree, g.level)
    for _ in range(abs(n)):
        out = compose(out, base)
    return out


def is_trivial(g: TreeAutomorphism) -> bool:
    """Reachable-state scan: every state has the identity root permutation."""
    return all(p == _identity_perm(len(p)) for p in g.perms)


def equals(g: TreeAutomorphism, h: TreeAutomorphism) -> bool:
    return is_trivial(compose(g, invert(h)))


def order(g: TreeAutomorphism, limit: int = 256) -> int | None:
    """Order of ``g`` if at most ``limit``, else None."""
    x = g
    for n in range(1, limit + 1):
        if x.is_trivial:
            return n
        x = compose(x, g)
    return None


# -- action and sections ------------------------------------------------------


def state_at(g: TreeAutomorphism, v: Vertex) -> int:
    s = 0
    for x in v:
        s = g.sections[s][x]
    return s


def section(g: TreeAutomorphism, v: Vertex) -> TreeAutomorphism:
    """``g|_v``: the unique automorphism with ``g(vw) = g(v) g|_v(w)``."""
    return g.from_state(state_at(g, tuple(v)))


def act_vertex(g: TreeAutomorphism, v: Vertex) -> Vertex:
    s = 0
    out = []
    for x in v:
        out.append(g.perms[s][x])
        s = g.sections[s][x]
    return tuple(out)


def act_ray(g: TreeAutomorphism, ray: Ray) -> Ray:
    if not g.tree.is_regular:
        raise TreeError("exact ray action needs a regular tree")
    s = 0
    pre_out = []
    for x in ray.preperiod:
        pre_out.append(g.perms[s][x])
        s = g.sections[s][x]
    p = len(ray.period)
    seen: dict[tuple[int, int], int] = {}
    out: list[int] = []
    pos = 0
    while (s, pos) not in seen:
        seen[(s, pos)] = len(out)
        x = ray.period[pos]
        out.append(g.perms[s][x])
        s = g.sections[s][x]
        pos = (pos + 1) % p
    start = seen[(s, pos)]
    return Ray(tuple(pre_out) + tuple(out[:start]), tuple(out[start:]))


def act(g: TreeAutomorphism, x):
    if isinstance(x, Ray):
        return act_ray(g, x)
    return act_vertex(g, tuple(x))


def ray_states(g: TreeAutomorphism, ray: Ray) -> list[int]:
    """States visited along ``ray`` until the (state, period position) pair cycles."""
    s = 0
    visited = [s]
    for x in ray.preperiod:
        s = g.sections[s][x]
        visited.append(s)
    p = len(ray.period)
    seen = set()
    pos = 0
    while (s, pos) not in seen:
        seen.add((s, pos))
        s = g.sections[s][ray.period[pos]]
        visited.append(s)
        pos = (pos + 1) % p
    return visited


def germ_trivial_at(g: TreeAutomorphism, ray: Ray) -> bool:
    """``g`` fixes a neighbourhood of ``ray`` pointwise."""
    if act_ray(g, ray) != ray:
        return False
    return any(g.state_is_trivial(s) for s in ray_states(g, ray))


def fixes_cylinder(g: TreeAutomorphism, w: Vertex) -> bool:
    """``g`` fixes ``∂T_w`` pointwise: ``g(w) = w`` and ``g|_w`` trivial."""
    s = 0
    for x in w:
        if g.perms[s][x] != x:
            return False
        s = g.sections[s][x]
    return g.state_is_trivial(s)


def fixes_antichain(g: TreeAutomorphism, a: Iterable[Vertex]) -> Vertex | None:
    """First cylinder of ``a`` not fixed pointwise, or None."""
    for w in a:
        if not fixes_cylinder(g, w):
            return w
    return None


def image_antichain(g: TreeAutomorphism, a: Antichain) -> Antichain:
    return Antichain(tuple(act_vertex(g, v) for v in a.vertices))


def supported_in(g: TreeAutomorphism, region: Antichain) -> bool:
    """Support of ``g`` lies inside the union of the cylinders of ``region``."""
    return fixes_antichain(g, complement_antichain(region, g.tree).vertices) is None


def in_rigid_stabilizer(g: TreeAutomorphism, v: Vertex) -> bool:
    """``g`` acts trivially outside ``∂T_v``."""
    s = 0
    for x in v:
        p, sec = g.perms[s], g.sections[s]
        for y in range(len(p)):
            if y == x:
                if p[y] != y:
                    return False
            elif p[y] != y or not g.state_is_trivial(sec[y]):
                return False
        s = sec[x]
    return True


# -- portraits, activity, support ------------------------------------------------


@dataclass(frozen=True)
class Portrait:
    """Vertex permutations of a finite truncation.

    ``levels[k]`` lists the permutation at every level-``k`` vertex in
    lexicographic order, for ``k = 0..depth``.
    """

    depth: int
    levels: tuple[tuple[tuple[int, ...], ...], ...]

    def at(self, v: Vertex) -> tuple[int, ...]:
        return self.levels[len(v)][_lex_index(v, self)]

    def nontrivial_vertices(self) -> list[Vertex]:
        out = []
        for k, row in enumerate(self.levels):
            for idx, p in enumerate(row):
                if any(i != x for i, x in enumerate(p)):
                    out.append(_lex_vertex(idx, k, self))
        return out


def _degrees_of(portrait: Portrait, k: int) -> list[int]:
    return [len(portrait.levels[i][0]) for i in range(k)]


def _lex_index(v: Vertex, portrait: Portrait) -> int:
    idx = 0
    for d, x in zip(_degrees_of(portrait, len(v)), v):
        idx = idx * d + x
    return idx


def _lex_vertex(idx: int, k: int, portrait: Portrait) -> Vertex:
    out = []
    for d in reversed(_degrees_of(portrait, k)):
        out.append(idx % d)
        idx //= d
    return tuple(reversed(out))


def portrait(g: TreeAutomorphism, depth: int) -> Portrait:
    if depth < 0:
        raise ValueError("depth must be >= 0")
    states = [0]
    rows = []
    for _ in range(depth + 1):
        rows.append(tuple(g.perms[s] for s in states))
        states = [t for s in states for t in g.sections[s]]
    return Portrait(depth, tuple(rows))


def level_state_counts(g: TreeAutomorphism, n: int) -> Counter:
    counts = Counter({0: 1})
    for _ in range(n):
        nxt: Counter = Counter()
        for s, c in counts.items():
            for t in g.sections[s]:
                nxt[t] += c
        counts = nxt
    return counts


def activity(g: TreeAutomorphism, n: int) -> int:
    """Number of level-``n`` vertices with nontrivial section."""
    if n < 0:
        raise ValueError("n must be >= 0")
    return sum(c for s, c in level_state_counts(g, n).items() if not g.state_is_trivial(s))


@dataclass(frozen=True)
class SupportCover:
    cover: Antichain
    fixed: Antichain
    exact: bool


def _states_fixing_some_cylinder(g: TreeAutomorphism) -> set[int]:
    out = set(g._trivial)
    changed = True
    while changed:
        changed = False
        for s in range(g.num_states):
            if s in out:
                continue
            if any(g.perms[s][i] == i and g.sections[s][i] in out for i in range(len(g.perms[s]))):
                out.add(s)
                changed = True
    return out


def support_antichain(g: TreeAutomorphism, depth: int) -> SupportCover:
    """Coarsest cover of the support by cylinders of depth <= ``depth``.

    ``exact`` is True when no cylinder of the cover contains a pointwise fixed
    sub-cylinder, i.e. refining deeper cannot shrink the cover.
    """
    if depth < 0:
        raise ValueError("depth must be >= 0")
    fixed: list[Vertex] = []

    def walk(v: Vertex, s: int, moved: bool):
        if not moved and g.state_is_trivial(s):
            fixed.append(v)
            return
        if moved or len(v) >= depth:
            return
        for x in range(len(g.perms[s])):
            walk(v + (x,), g.sections[s][x], g.perms[s][x] != x)

    walk(ROOT, 0, False)
    fixed_ac = Antichain(tuple(fixed))
    cover = complement_antichain(fixed_ac, g.tree)
    can_fix = _states_fixing_some_cylinder(g)
    exact = True
    for w in cover.vertices:
        if act_vertex(g, w) == w and state_at(g, w) in can_fix:
            exact = False
            break
    return SupportCover(cover, fixed_ac, exact)


# -- contraction and boundedness ---------------------------------------------------


def section_closure(elements: Iterable[TreeAutomorphism]) -> set[TreeAutomorphism]:
    out: set[TreeAutomorphism] = set()
    stack = list(elements)
    while stack:
        g = stack.pop()
        if g in out:
            continue
        out.add(g)
        for s in range(g.num_states):
            if s:
                stack.append(g.from_state(s))
    return out


def _section_map(g: TreeAutomorphism) -> list[TreeAutomorphism]:
    return [section(g, (x,)) for x in range(len(g.perms[0]))]


def _cycle_core(elements: set[TreeAutomorphism]) -> set[TreeAutomorphism]:
    """Elements lying on a cycle of the section graph, plus everything below them."""
    succ = {g: _section_map(g) for g in elements}
    on_cycle = set()
    for g in elements:
        seen = set()
        stack = list(succ[g])
        while stack:
            h = stack.pop()
            if h == g:
                on_cycle.add(g)
                break
            if h in seen or h not in succ:
                continue
            seen.add(h)
            stack.extend(succ[h])
    return section_closure(on_cycle)


def nucleus(generators: Sequence[TreeAutomorphism], max_states: int = 200) -> set[TreeAutomorphism]:
    """Nucleus of the contracting group generated by ``generators`` (inverses included)."""
    gens = list(generators)
    if not gens:
        raise ValueError("need at least one generator")
    tree = gens[0].tree
    if not tree.is_regular:
        raise TreeError("nucleus is defined for regular trees only")
    sym = gens + [invert(g) for g in gens]
    core = _cycle_core(section_closure(sym))
    core.add(TreeAutomorphism.identity(tree))
    while True:
        if len(core) > max_states:
            raise NotContractingUpTo(max_states, len(core))
        ordered = sorted(core, key=_sort_key)
        products = {compose(x, y) for x in ordered for y in ordered}
        closure = section_closure(products | core)
        if len(closure) > 50 * max_states:
            raise NotContractingUpTo(max_states, len(closure))
        new = _cycle_core(closure)
        if new <= core:
            return core
        core |= new


def _sort_key(g: TreeAutomorphism):
    return (g.num_states, g.perms, g.sections)


@dataclass(frozen=True)
class BoundedVerdict:
    kind: str  # "bounded_with" | "unbounded_evidence" | "inconclusive"
    horizon: int
    activity: tuple[int, ...]
    bound: int | None = None
    rays: tuple[Ray, ...] = ()
    at_level: int | None = None
    count: int | None = None

    def __str__(self):
        if self.kind == "bounded_with":
            rays = ", ".join(str(r) for r in self.rays)
            return f"bounded_with(bound={self.bound}, rays=[{rays}], horizon={self.horizon})"
        if self.kind == "unbounded_evidence":
            return f"unbounded_evidence(n={self.at_level}, count={self.count}, horizon={self.horizon})"
        return f"inconclusive(horizon={self.horizon})"


def _nontrivial_cycles(g: TreeAutomorphism) -> tuple[list[list[tuple[int, int]]], bool]:
    """Simple cycles among nontrivial states reachable from 0.

    Returns the cycles as (state, letter) edge lists and whether the cycle
    structure is bounded in Sidki's sense (no path joins two distinct cycles).
    """
    nontriv = [s for s in range(g.num_states) if not g.state_is_trivial(s)]
    adj = {s: [(x, t) for x, t in enumerate(g.sections[s]) if not g.state_is_trivial(t)] for s in nontriv}
    # strongly connected components (iterative Tarjan)
    index: dict[int, int] = {}
    low: dict[int, int] = {}
    comp: dict[int, int] = {}
    stack: list[int] = []
    on = set()
    counter = itertools.count()
    comps: list[list[int]] = []
    for root in nontriv:
        if root in index:
            continue
        work = [(root, 0)]
        while work:
            v, i = work.pop()
            if i == 0:
                index[v] = low[v] = next(counter)
                stack.append(v)
                on.add(v)
            recurse = False
            for j in range(i, len(adj[v])):
                w = adj[v][j][1]
                if w not in index:
                    work.append((v, j + 1))
                    work.append((w, 0))
                    recurse = True
                    break
                if w in on:
                    low[v] = min(low[v], index[w])
            if recurse:
                continue
            if low[v] == index[v]:
                members = []
                while True:
                    w = stack.pop()
                    on.discard(w)
                    comp[w] = len(comps)
                    members.append(w)
                    if w == v:
                        break
                comps.append(members)
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
    cyclic = []
    bounded = True
    for cid, members in enumerate(comps):
        internal = [(s, x, t) for s in members for x, t in adj[s] if comp[t] == cid]
        if not internal:
            continue
        if len(internal) != len(members):
            bounded = False
        cyclic.append(cid)
    # reachability between distinct cyclic components
    for cid in cyclic:
        seen = set()
        stack2 = [t for s in comps[cid] for _, t in adj[s] if comp[t] != cid]
        while stack2:
            t = stack2.pop()
            if t in seen:
                continue
            seen.add(t)
            if comp[t] in cyclic and comp[t] != cid:
                bounded = False
            stack2.extend(u for _, u in adj[t])
    cycles = []
    for cid in cyclic:
        start = min(comps[cid])
        cyc = []
        s = start
        while True:
            x, t = next((x, t) for x, t in adj[s] if comp[t] == cid)
            cyc.append((s, x))
            s = t
            if s == start or len(cyc) > len(comps[cid]):
                break
        cycles.append(cyc)
    return cycles, bounded


def _path_to(g: TreeAutomorphism, target: int) -> Vertex:
    prev = {0: None}
    order = [0]
    i = 0
    while i < len(order):
        s = order[i]
        for x, t in enumerate(g.sections[s]):
            if t not in prev:
                prev[t] = (s, x)
                order.append(t)
        i += 1
    path = []
    s = target
    while prev[s] is not None:
        s, x = prev[s]
        path.append(x)
    return tuple(reversed(path))


def bounded_check(g: TreeAutomorphism, horizon: int = 12) -> BoundedVerdict:
    """Activity table up to ``horizon`` plus cycle tracing through the automaton."""
    if not g.tree.is_regular:
        raise TreeError("bounded_check is defined for regular trees only")
    table = tuple(activity(g, n) for n in range(horizon + 1))
    cycles, structurally_bounded = _nontrivial_cycles(g)
    if structurally_bounded:
        rays = []
        for cyc in cycles:
            pre = _path_to(g, cyc[0][0])
            rays.append(Ray(pre, tuple(x for _, x in cyc)))
        rays = sorted(set(rays), key=lambda r: (len(r.preperiod), r.preperiod, r.period))
        return BoundedVerdict("bounded_with", horizon, table, bound=max(table), rays=tuple(rays))
    half = horizon // 2
    if horizon >= 2 and all(table[n + 1] > table[n] for n in range(half, horizon)):
        return BoundedVerdict("unbounded_evidence", horizon, table, at_level=horizon, count=table[horizon])
    return BoundedVerdict("inconclusive", horizon, table)

