"""Confining sets, displacement configurations and the commutator engine.

Subgroups are given by membership oracles.  Every positive verdict here is
bounded by the scale it was computed at (ball radius, cylinder depth) and
says so; negative verdicts (refutations, counterexamples) are definitive.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .automorphisms import (
    TreeAutomorphism,
    act_ray,
    act_vertex,
    commutator,
    compose,
    conjugate,
    fixes_antichain,
    germ_trivial_at,
    image_antichain,
    in_rigid_stabilizer,
    invert,
    is_trivial,
    portrait,
    supported_in,
)
from .group_actions import GroupSpec, word_str
from .words_tree import (
    Antichain,
    Ray,
    Vertex,
    disjoint,
    first_meeting_pair,
    normalize,
    same_set,
    shortlex,
    vertex_str,
)

DEFAULT_WORD_LIST_SCOPE = 10_000


class OracleScopeExceeded(RuntimeError):
    pass


class OrderTwoObstruction(ValueError):
    def __init__(self, index: int, label: str):
        super().__init__(f"element {label} (position {index}) has order <= 2; no displacement cylinder exists")
        self.index = index
        self.label = label


class DepthBudgetExceeded(RuntimeError):
    pass


class ConfigNotVerified(ValueError):
    pass


class NoRistGenerators(RuntimeError):
    pass


@dataclass(frozen=True)
class Named:
    """An element with a human-readable name (a word, or ``k1@01`` for a placed hint)."""

    label: str
    element: TreeAutomorphism

    def __str__(self):
        return self.label


# -- oracles ----------------------------------------------------------------------


@dataclass
class SubgroupOracle:
    """Decidable membership in a subgroup of tree automorphisms.

    kinds: ``point`` (stabilizer of a ray), ``germ`` (germ stabilizer of a
    ray), ``rigid`` (rigid stabilizer of a vertex), ``fixator`` (elements
    supported in the union of ``region``; equivalently fixing its clopen
    complement pointwise), ``word_list`` (subgroup generated by finitely many
    elements, decided by enumeration up to ``scope`` elements), and ``whole``.
    """

    kind: str
    ray: Ray | None = None
    vertex: Vertex | None = None
    region: Antichain | None = None
    generators: tuple[TreeAutomorphism, ...] = ()
    scope: int = DEFAULT_WORD_LIST_SCOPE
    name: str = ""
    _elements: set | None = field(default=None, repr=False)
    _closed: bool = field(default=False, repr=False)

    KINDS = ("point", "germ", "rigid", "fixator", "word_list", "whole")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown oracle kind {self.kind!r}")
        need = {"point": self.ray, "germ": self.ray, "rigid": self.vertex, "fixator": self.region}
        if self.kind in need and need[self.kind] is None:
            raise ValueError(f"{self.kind} oracle needs its defining datum")
        if not self.name:
            self.name = self.describe()

    @classmethod
    def point_stabilizer(cls, ray: Ray) -> SubgroupOracle:
        return cls("point", ray=ray)

    @classmethod
    def germ_stabilizer(cls, ray: Ray) -> SubgroupOracle:
        return cls("germ", ray=ray)

    @classmethod
    def rigid_stabilizer(cls, v: Vertex) -> SubgroupOracle:
        return cls("rigid", vertex=tuple(v))

    @classmethod
    def fixator(cls, region: Antichain) -> SubgroupOracle:
        return cls("fixator", region=region)

    @classmethod
    def word_list(cls, generators: Iterable[TreeAutomorphism], scope: int = DEFAULT_WORD_LIST_SCOPE) -> SubgroupOracle:
        return cls("word_list", generators=tuple(generators), scope=scope)

    @classmethod
    def whole(cls) -> SubgroupOracle:
        return cls("whole")

    def describe(self) -> str:
        if self.kind in ("point", "germ"):
            return f"{self.kind}_stabilizer({self.ray})"
        if self.kind == "rigid":
            return f"rigid_stabilizer({vertex_str(self.vertex)})"
        if self.kind == "fixator":
            return f"supported_in({self.region})"
        if self.kind == "word_list":
            return f"word_list({len(self.generators)} generators)"
        return "whole_group"

    @property
    def scope_note(self) -> str:
        if self.kind == "word_list":
            state = "closed" if self._closed else f"enumerated up to {self.scope} elements"
            return f"membership by enumeration ({state})"
        return "exact"

    def _enumerate(self):
        if self._elements is not None:
            return
        gens = [g for g in self.generators if not is_trivial(g)]
        gens += [invert(g) for g in gens]
        first = next(iter(self.generators), None)
        if first is None:
            self._elements, self._closed = set(), True
            return
        e = TreeAutomorphism.identity(first.tree)
        seen = {e}
        frontier = [e]
        while frontier and len(seen) < self.scope:
            nxt = []
            for g in frontier:
                for s in gens:
                    h = compose(s, g)
                    if h not in seen:
                        seen.add(h)
                        nxt.append(h)
            frontier = nxt
        self._elements = seen
        self._closed = not frontier

    def contains(self, g: TreeAutomorphism) -> bool:
        k = self.kind
        if k == "whole":
            return True
        if k == "point":
            return act_ray(g, self.ray) == self.ray
        if k == "germ":
            return germ_trivial_at(g, self.ray)
        if k == "rigid":
            return in_rigid_stabilizer(g, self.vertex)
        if k == "fixator":
            return supported_in(g, self.region)
        if is_trivial(g):
            return True
        self._enumerate()
        if g in self._elements:
            return True
        if self._closed:
            return False
        raise OracleScopeExceeded(f"{self.name}: element not found among {len(self._elements)} enumerated elements")

    def contains_conjugate(self, sigma: TreeAutomorphism, g: TreeAutomorphism) -> bool:
        """Is ``g^-1 sigma g`` in the subgroup?  Uses the moved datum when possible."""
        k = self.kind
        if k == "point":
            return act_ray(sigma, act_ray(g, self.ray)) == act_ray(g, self.ray)
        if k == "germ":
            return germ_trivial_at(sigma, act_ray(g, self.ray))
        if k == "rigid":
            return in_rigid_stabilizer(sigma, act_vertex(g, self.vertex))
        if k == "fixator":
            return supported_in(sigma, image_antichain(g, self.region))
        return self.contains(conjugate(sigma, invert(g)))


@dataclass
class AnyOf:
    """Tuple of oracles (H_1, ..., H_n): an element counts when some H_k contains it."""

    oracles: tuple[SubgroupOracle, ...]

    @property
    def name(self) -> str:
        return " | ".join(o.name for o in self.oracles)

    @property
    def scope_note(self) -> str:
        return "; ".join(o.scope_note for o in self.oracles)

    def contains(self, g) -> bool:
        return any(o.contains(g) for o in self.oracles)

    def contains_conjugate(self, sigma, g) -> bool:
        return any(o.contains_conjugate(sigma, g) for o in self.oracles)


Oracle = SubgroupOracle | AnyOf


# -- rigid stabilizers ----------------------------------------------------------------


def rist_ball(G: GroupSpec, v: Vertex, L: int, hints: bool = True) -> list[Named]:
    """Nontrivial elements of ``rist(v) ∩ B(L)`` in ball order, then registry hints, deduplicated."""
    from .registry import entry_for

    v = tuple(v)
    out: list[Named] = []
    seen: set[TreeAutomorphism] = set()
    for g, word in G.ball(L):
        if word and g not in seen and in_rigid_stabilizer(g, v):
            seen.add(g)
            out.append(Named(word_str(word), g))
    if hints:
        entry = entry_for(G)
        if entry is not None and entry.rist_lifts is not None:
            for name, g in zip(sorted(entry.rist_lifts.base), entry.rist_hints(v)):
                if g not in seen:
                    seen.add(g)
                    out.append(Named(f"{name}@{vertex_str(v)}", g))
    return out


def rist_of_region(G: GroupSpec, region: Antichain, L: int) -> list[Named]:
    out, seen = [], set()
    for w in region.vertices:
        for n in rist_ball(G, w, L):
            if n.element not in seen:
                seen.add(n.element)
                out.append(n)
    return out


# -- confining sets --------------------------------------------------------------------


@dataclass(frozen=True)
class ConfiningVerdict:
    confirmed: bool
    radius: int
    checked: int
    witness: TreeAutomorphism | None = None
    witness_word: tuple[str, ...] | None = None

    def __str__(self):
        if self.confirmed:
            return f"confirmed_up_to(L={self.radius})"
        return f"refuted_at(g={word_str(self.witness_word)}, L={self.radius})"

    def to_json(self) -> dict:
        out = {"verdict": "confirmed" if self.confirmed else "refuted", "L": self.radius, "checked": self.checked}
        if self.witness_word is not None:
            out["witness"] = word_str(self.witness_word)
        return out


def covered_by(sigma: TreeAutomorphism, H: Oracle, g: TreeAutomorphism) -> bool:
    return H.contains_conjugate(sigma, g)


def check_confining(P: Sequence[TreeAutomorphism], H: Oracle, G: GroupSpec, L: int) -> ConfiningVerdict:
    """Exhaustive over ``B(L)``: every ``g`` needs some ``sigma`` in P with ``g^-1 sigma g`` in H."""
    P = list(P)
    for sigma in P:
        if is_trivial(sigma):
            raise ValueError("confining sets consist of nontrivial elements")
    ball = G.ball(L)
    for i, (g, word) in enumerate(ball):
        if not any(H.contains_conjugate(sigma, g) for sigma in P):
            return ConfiningVerdict(False, L, i + 1, g, word)
    return ConfiningVerdict(True, L, len(ball))


# -- displacement configurations --------------------------------------------------------


@dataclass(frozen=True)
class DisplacementConfig:
    P: tuple[TreeAutomorphism, ...]
    omega: tuple[Antichain, ...]
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        if len(self.P) != len(self.omega):
            raise ValueError("one cylinder set per element")
        if not self.labels:
            object.__setattr__(self, "labels", tuple(f"p{i}" for i in range(len(self.P))))
        for a in self.omega:
            if not len(a):
                raise ValueError("displacement sets must be nonempty")

    def union(self) -> Antichain:
        return normalize([v for a in self.omega for v in a.vertices], self.P[0].tree)

    def to_json(self) -> dict:
        return {
            "P": [{"label": lab, "automaton": g.to_json()} for lab, g in zip(self.labels, self.P)],
            "omega": [[vertex_str(v) for v in a.vertices] for a in self.omega],
        }


@dataclass(frozen=True)
class DisplacementReport:
    c1: bool
    c3: bool
    c4: bool
    witnesses: tuple[str, ...]
    moved: tuple[tuple[int, ...], ...]  # M_sigma per element: indices rho with sigma(Omega_rho) off the union
    fixed: tuple[tuple[int, ...], ...]  # F_sigma: indices rho with Omega_rho fixed pointwise by sigma

    @property
    def ok(self) -> bool:
        return self.c1 and self.c3 and self.c4

    def __str__(self):
        flags = " ".join(f"{n}={'pass' if v else 'fail'}" for n, v in (("C1", self.c1), ("C3", self.c3), ("C4", self.c4)))
        return flags + ("" if self.ok else f" [{self.witnesses[0]}]")

    def to_json(self) -> dict:
        return {
            "C1": self.c1,
            "C3": self.c3,
            "C4": self.c4,
            "witnesses": list(self.witnesses),
            "M": [list(m) for m in self.moved],
            "F": [list(f) for f in self.fixed],
        }


def _image(g: TreeAutomorphism, a: Antichain) -> Antichain:
    return image_antichain(g, a)


def verify_displacement(cfg: DisplacementConfig) -> DisplacementReport:
    """Exact check of C1, C3, C4 through cylinder images ``g(∂T_w) = ∂T_{g(w)}``."""
    P, omega, labels = cfg.P, cfg.omega, cfg.labels
    tree = P[0].tree
    union = cfg.union()
    inverses = [invert(s) for s in P]
    witnesses = []
    c1 = c3 = c4 = True
    for i, j in itertools.combinations(range(len(P)), 2):
        if not same_set(omega[i], omega[j], tree) and not disjoint(omega[i], omega[j]):
            c1 = False
            witnesses.append(f"C1: Omega[{labels[i]}] and Omega[{labels[j]}] overlap without being equal")
    moved, fixed = [], []
    for i, sigma in enumerate(P):
        m, f = [], []
        for j in range(len(P)):
            if fixes_antichain(sigma, omega[j].vertices) is None:
                f.append(j)
            elif disjoint(_image(sigma, omega[j]), union):
                m.append(j)
            else:
                c3 = False
                pair = first_meeting_pair(_image(sigma, omega[j]), union)
                witnesses.append(
                    f"C3: {labels[i]} moves Omega[{labels[j]}] onto {vertex_str(pair[0])}, meeting {vertex_str(pair[1])}"
                )
        moved.append(tuple(m))
        fixed.append(tuple(f))
        image = _image(sigma, omega[i])
        pre_images = normalize([v for a in omega for v in _image(inverses[i], a).vertices], tree)
        if not disjoint(image, union):
            c4 = False
            witnesses.append(f"C4: {labels[i]}(Omega[{labels[i]}]) meets the union of the Omega")
        elif not disjoint(image, pre_images):
            c4 = False
            witnesses.append(f"C4: {labels[i]}(Omega[{labels[i]}]) meets {labels[i]}^-1 of the union")
    return DisplacementReport(c1, c3, c4, tuple(witnesses), tuple(moved), tuple(fixed))


def _candidates(tree, depth_budget: int):
    for n in range(depth_budget + 1):
        yield from tree.vertices(n)


def build_displacement(
    P: Sequence[TreeAutomorphism], depth_budget: int = 8, labels: Sequence[str] | None = None, node_budget: int = 200_000
) -> DisplacementConfig:
    """Single-cylinder displacement configuration by greedy extension with backtracking.

    Elements are processed in order; for each, the first vertex ``w`` in
    shortlex order with ``w, sigma(w), sigma^-1(w)`` distinct such that the
    partial configuration still verifies is taken.  When no such vertex
    exists the previous choice is replaced by its next candidate, which is how
    earlier cylinders get shrunk.
    """
    P = tuple(P)
    labels = tuple(labels) if labels else tuple(f"p{i}" for i in range(len(P)))
    if not P:
        raise ValueError("empty P")
    tree = P[0].tree
    for i, sigma in enumerate(P):
        if is_trivial(compose(sigma, sigma)):
            raise OrderTwoObstruction(i, labels[i])
    options = []
    for sigma in P:
        inv = invert(sigma)
        opts = []
        for w in _candidates(tree, depth_budget):
            if act_vertex(sigma, w) != w and act_vertex(inv, w) != act_vertex(sigma, w):
                opts.append(w)
        if not opts:
            raise DepthBudgetExceeded(f"no vertex of depth <= {depth_budget} is displaced twice by an element of P")
        options.append(opts)
    nodes = 0
    choice = [0] * len(P)
    k = 0
    while k < len(P):
        placed = False
        while choice[k] < len(options[k]):
            nodes += 1
            if nodes > node_budget:
                raise DepthBudgetExceeded(f"search budget {node_budget} exhausted at depth {depth_budget}")
            cfg = DisplacementConfig(
                P[: k + 1], tuple(Antichain((options[i][choice[i]],)) for i in range(k + 1)), labels[: k + 1]
            )
            if verify_displacement(cfg).ok:
                placed = True
                break
            choice[k] += 1
        if placed:
            k += 1
            if k < len(P):
                choice[k] = 0
            continue
        if k == 0:
            raise DepthBudgetExceeded(f"no displacement configuration with cylinders of depth <= {depth_budget}")
        choice[k] = 0
        k -= 1
        choice[k] += 1
    cfg = DisplacementConfig(P, tuple(Antichain((options[i][choice[i]],)) for i in range(len(P))), labels)
    assert verify_displacement(cfg).ok
    return cfg


# -- removing involutions from a confining set ------------------------------------------


@dataclass(frozen=True)
class RefineResult:
    P: tuple[TreeAutomorphism, ...]
    labels: tuple[str, ...]
    verdict: ConfiningVerdict
    candidates_tried: int

    @property
    def ok(self) -> bool:
        return self.verdict.confirmed

    def __str__(self):
        return f"refined {len(self.P)} elements, {self.verdict}"


def refine_confining(
    P: Sequence[TreeAutomorphism],
    H: Oracle,
    G: GroupSpec,
    L: int,
    labels: Sequence[str] | None = None,
    pool_radius: int = 4,
    pool_depth: int = 1,
) -> RefineResult:
    """Replace involutions by elements ``(g_j s g_j^-1)^-1 (g_k s g_k^-1)`` with ``g_j, g_k`` rigid.

    The conjugators are drawn from rigid stabilizers of the vertices at
    ``pool_depth`` (and the identity).  Candidates of order > 2 are chosen
    greedily until every element of ``B(L)`` is covered, redundant ones are
    pruned, and the result is re-checked with :func:`check_confining`.
    """
    P = list(P)
    labels = list(labels) if labels else [f"p{i}" for i in range(len(P))]
    if all(not is_trivial(compose(s, s)) for s in P):
        return RefineResult(tuple(P), tuple(labels), check_confining(P, H, G, L), 0)
    pool: list[Named] = [Named("1", G.identity)]
    seen = {G.identity}
    for v in G.tree.vertices(pool_depth):
        for n in rist_ball(G, v, pool_radius):
            if n.element not in seen:
                seen.add(n.element)
                pool.append(n)
    cands: list[Named] = []
    cand_seen: set[TreeAutomorphism] = set()
    for s, lab in zip(P, labels):
        if not is_trivial(compose(s, s)):
            if s not in cand_seen:
                cand_seen.add(s)
                cands.append(Named(lab, s))
            continue
        conj = [conjugate(s, g.element) for g in pool]
        for j, k in itertools.combinations(range(len(pool)), 2):
            h = compose(invert(conj[j]), conj[k])
            if h in cand_seen or is_trivial(compose(h, h)):
                continue
            cand_seen.add(h)
            cands.append(Named(f"{_conj_label(pool[j].label, lab)}^-1.{_conj_label(pool[k].label, lab)}", h))
    ball = G.ball(L)
    cover = [{i for i, (g, _) in enumerate(ball) if H.contains_conjugate(c.element, g)} for c in cands]
    todo = set(range(len(ball)))
    chosen: list[int] = []
    while todo:
        best = max(range(len(cands)), key=lambda c: (len(cover[c] & todo), -c))
        if not cover[best] & todo:
            break
        chosen.append(best)
        todo -= cover[best]
    for c in list(chosen):
        rest = [d for d in chosen if d != c]
        if rest and set().union(*(cover[d] for d in rest)) >= set(range(len(ball))):
            chosen = rest
    if not chosen:
        chosen = [0] if cands else []
    newP = tuple(cands[c].element for c in chosen)
    newlabels = tuple(cands[c].label for c in chosen)
    verdict = check_confining(newP, H, G, L) if newP else ConfiningVerdict(False, L, 0, G.identity, ())
    return RefineResult(newP, newlabels, verdict, len(cands))


def _conj_label(g: str, s: str) -> str:
    return s if g == "1" else f"({g}.{s}.{g}^-1)"


# -- the commutator engine ----------------------------------------------------------------


@dataclass
class LedgerEntry:
    check: str
    passed: bool
    count: int
    detail: str = ""

    def to_json(self) -> dict:
        return {"check": self.check, "passed": self.passed, "count": self.count, "detail": self.detail}


PORTRAIT_DEPTH = 3


def _element_json(n: Named) -> dict:
    p = portrait(n.element, PORTRAIT_DEPTH)
    return {"label": n.label, "automaton": n.element.to_json(), "portrait": [list(map(list, lvl)) for lvl in p.levels]}


@dataclass
class SigmaReport:
    index: int
    label: str
    moved: tuple[int, ...]
    fixed: tuple[int, ...]
    Y: list[Named]
    a_elements: list[Named]
    D_generators: list[Named]
    B_elements: list[Named]
    h0: Named | None
    rho: int | None
    N_generators: list[Named]
    search_log: list[str]

    def to_json(self) -> dict:
        def names(xs):
            return [x.label for x in xs]

        return {
            "index": self.index,
            "label": self.label,
            "M": list(self.moved),
            "F": list(self.fixed),
            "Y": names(self.Y),
            "a": names(self.a_elements),
            "D": names(self.D_generators),
            "B": names(self.B_elements),
            "h0": None if self.h0 is None else self.h0.label,
            "rho": self.rho,
            "N": [_element_json(n) for n in self.N_generators],
            "search_log": list(self.search_log),
        }


@dataclass
class EngineReport:
    scale: dict
    oracle: str
    config: dict
    R_generators: list[str]
    R_sample_size: int
    R_truncated: bool
    sigmas: list[SigmaReport]
    ledger: list[LedgerEntry]
    chosen: int | None

    @property
    def all_pass(self) -> bool:
        return all(e.passed for e in self.ledger)

    @property
    def verdict(self) -> str:
        scale = ", ".join(f"{k}={v}" for k, v in sorted(self.scale.items()))
        if self.chosen is None:
            return f"inconclusive({scale})"
        s = self.sigmas[self.chosen]
        return f"N_found(sigma={s.label}, rho={s.rho}, generators={len(s.N_generators)}, {scale})"

    def to_json(self) -> dict:
        return {
            "scale": dict(self.scale),
            "oracle": self.oracle,
            "config": self.config,
            "R_generators": list(self.R_generators),
            "R_sample_size": self.R_sample_size,
            "R_truncated": self.R_truncated,
            "sigmas": [s.to_json() for s in self.sigmas],
            "ledger": [e.to_json() for e in self.ledger],
            "chosen": self.chosen,
            "verdict": self.verdict,
            "all_pass": self.all_pass,
        }


def _ledger_add(ledger: dict, check: str, ok: bool, detail: str = ""):
    entry = ledger.setdefault(check, LedgerEntry(check, True, 0))
    entry.count += 1
    if not ok and entry.passed:
        entry.passed = False
        entry.detail = detail


def _generated_ball(gens: Sequence[Named], radius: int, cap: int) -> tuple[list[Named], bool]:
    letters = []
    for n in gens:
        letters.append(n)
        inv = invert(n.element)
        if inv != n.element:
            letters.append(Named(f"{n.label}^-1", inv))
    e = TreeAutomorphism.identity(gens[0].element.tree)
    out = [Named("1", e)]
    seen = {e}
    frontier = [out[0]]
    truncated = False
    for _ in range(radius):
        nxt = []
        for x in frontier:
            for s in letters:
                h = compose(s.element, x.element)
                if h in seen:
                    continue
                if len(out) >= cap:
                    truncated = True
                    break
                seen.add(h)
                label = s.label if x.label == "1" else f"{s.label}.{x.label}"
                y = Named(label, h)
                out.append(y)
                nxt.append(y)
        frontier = nxt
    return out, truncated


def commutator_engine(
    cfg: DisplacementConfig,
    H: Oracle,
    G: GroupSpec,
    L: int,
    rist_radius: int = 3,
    max_sample: int = 40,
    max_lambda: int = 3,
) -> EngineReport:
    """Run the constructive proof on samples and record every checked invariant.

    R is generated by rigid-stabilizer elements at the cylinders of the
    configuration; its ball of radius ``L`` (capped at ``max_sample``
    elements) stands in for R.  For each sigma: ``Y`` is the set of sampled
    ``g`` with ``g sigma g^-1`` in H, ``a_{d,g} = (d sigma^-1 d^-1)(g sigma g^-1)``
    over pairs, and ``B`` holds the conjugates of the ``a`` by ``l sigma l^-1``.
    A nontrivial ``h0`` in H supported in some ``Omega_rho`` (rho moved by
    sigma) is sought among the R-sample, then among commutators ``[a, b]``
    with ``b`` in B; the N-generators are ``a h0 a^-1``.
    """
    report = verify_displacement(cfg)
    if not report.ok:
        raise ConfigNotVerified(str(report))
    tree = G.tree
    P, omega = cfg.P, cfg.omega
    regions: list[Antichain] = []
    for a in omega:
        if a not in regions:
            regions.append(a)
    R_gens: list[Named] = []
    seen = set()
    for a in regions:
        for n in rist_of_region(G, a, rist_radius):
            if n.element not in seen:
                seen.add(n.element)
                R_gens.append(n)
    if not R_gens:
        raise NoRistGenerators(f"no rigid-stabilizer elements found at radius {rist_radius}")
    R_sample, truncated = _generated_ball(R_gens, L, max_sample)
    ledger: dict[str, LedgerEntry] = {}
    for n in R_gens:
        ok = any(supported_in(n.element, a) for a in regions)
        _ledger_add(ledger, "R generators rigid on a cylinder", ok, n.label)
    sigmas = []
    chosen = None
    for i, sigma in enumerate(P):
        lab = cfg.labels[i]
        sigma_inv = invert(sigma)
        M, F = report.moved[i], report.fixed[i]
        Y = [g for g in R_sample if H.contains(conjugate(sigma, g.element))]
        conj = {g.label: conjugate(sigma, g.element) for g in Y}
        conj_inv = {g.label: conjugate(sigma_inv, g.element) for g in Y}
        support_region = normalize(
            [v for rho in range(len(P)) if rho not in F for v in omega[rho].vertices + _image(sigma_inv, omega[rho]).vertices],
            tree,
        )
        a_list: list[Named] = []
        a_seen = set()
        pairs: list[tuple[Named, Named, TreeAutomorphism]] = []
        for d, g in itertools.product(Y, Y):
            a = compose(conj_inv[d.label], conj[g.label])
            pairs.append((d, g, a))
            if d.label == g.label:
                _ledger_add(ledger, "a(g,g) = 1", is_trivial(a), f"sigma={lab}, g={g.label}")
                continue
            name = f"a({d.label},{g.label})"
            _ledger_add(ledger, "a in H", H.contains(a), f"sigma={lab}, {name}")
            _ledger_add(ledger, "a supported off F", supported_in(a, support_region), f"sigma={lab}, {name}")
            restr = compose(a, compose(g.element, invert(d.element)))
            ok = all(fixes_antichain(restr, omega[rho].vertices) is None for rho in M)
            _ledger_add(ledger, "a agrees with d g^-1 on moved cylinders", ok, f"sigma={lab}, {name}")
            if not is_trivial(a) and a not in a_seen:
                a_seen.add(a)
                a_list.append(Named(name, a))
        D = []
        d_seen = set()
        for d, g, _ in pairs:
            x = compose(g.element, invert(d.element))
            if not is_trivial(x) and x not in d_seen:
                d_seen.add(x)
                D.append(Named(f"{g.label}.({d.label})^-1", x))
        B: list[Named] = []
        b_region = normalize(
            [v for rho in M for v in omega[rho].vertices + _image(sigma, omega[rho]).vertices], tree
        )
        for lam in Y[:max_lambda]:
            t = conj[lam.label]
            t_inv = invert(t)
            for a in a_list:
                b = compose(t, compose(a.element, t_inv))
                name = f"B[{lam.label}]({a.label})"
                preserved = all(
                    same_set(_image(b, omega[rho]), omega[rho], tree)
                    and same_set(_image(b, _image(sigma, omega[rho])), _image(sigma, omega[rho]), tree)
                    for rho in M
                )
                _ledger_add(ledger, "B preserves moved cylinders and their images", preserved, f"sigma={lab}, {name}")
                _ledger_add(ledger, "B supported on moved cylinders and images", supported_in(b, b_region), name)
                B.append(Named(name, b))
        h0, rho_found, log = _find_h0(H, sigma, omega, M, R_sample, a_list, B)
        N: list[Named] = []
        if h0 is not None:
            n_seen = set()
            for a in [Named("1", G.identity)] + a_list:
                n = conjugate(h0.element, a.element)
                if n in n_seen:
                    continue
                n_seen.add(n)
                N.append(Named(f"{a.label}.h0.{a.label}^-1" if a.label != "1" else "h0", n))
                _ledger_add(ledger, "N generator in H", H.contains(n), f"sigma={lab}")
                _ledger_add(
                    ledger, "N generator rigid on Omega_rho", supported_in(n, omega[rho_found]), f"sigma={lab}"
                )
            if chosen is None:
                chosen = i
        sigmas.append(SigmaReport(i, lab, M, F, Y, a_list, D, B, h0, rho_found, N, log))
    return EngineReport(
        scale={"L": L, "rist_radius": rist_radius, "max_sample": max_sample},
        oracle=H.name,
        config=cfg.to_json(),
        R_generators=[n.label for n in R_gens],
        R_sample_size=len(R_sample),
        R_truncated=truncated,
        sigmas=sigmas,
        ledger=sorted(ledger.values(), key=lambda e: e.check),
        chosen=chosen,
    )


def _find_h0(H, sigma, omega, M, R_sample, a_list, B):
    log = []
    for rho in M:
        for g in R_sample:
            if is_trivial(g.element):
                continue
            if supported_in(g.element, omega[rho]) and H.contains(g.element):
                log.append(f"rho={rho}: found in R-sample ({g.label})")
                return g, rho, log
        log.append(f"rho={rho}: no R-sample element in H")
    for rho in M:
        for a, b in itertools.product(a_list, B):
            c = commutator(a.element, b.element)
            if not is_trivial(c) and supported_in(c, omega[rho]) and H.contains(c):
                log.append(f"rho={rho}: found as [{a.label}, {b.label}]")
                return Named(f"[{a.label},{b.label}]", c), rho, log
        log.append(f"rho={rho}: no commutator [a, b] in H")
    return None, None, log


# -- derived subgroups of rigid stabilizers ------------------------------------------------


@dataclass(frozen=True)
class DerivedCheck:
    holds: bool
    vertex: Vertex
    radius: int
    tested: int
    counterexample: tuple[str, str] | None = None

    def __str__(self):
        if self.holds:
            return f"holds_on_sample(v={vertex_str(self.vertex)}, L={self.radius}, commutators={self.tested})"
        g1, g2 = self.counterexample
        return f"counterexample([{g1},{g2}], v={vertex_str(self.vertex)}, L={self.radius})"


def check_rist_derived_in_H(G: GroupSpec, v: Vertex, H: Oracle, L: int) -> DerivedCheck:
    """Are all commutators of sampled ``rist(v)`` elements in H?"""
    elems = rist_ball(G, v, L)
    tested = 0
    for x, y in itertools.combinations(elems, 2):
        c = commutator(x.element, y.element)
        tested += 1
        if not H.contains(c):
            return DerivedCheck(False, tuple(v), L, tested, (x.label, y.label))
    return DerivedCheck(True, tuple(v), L, tested)


def normal_commutator_identity(g1: TreeAutomorphism, g2: TreeAutomorphism, sigma: TreeAutomorphism) -> bool:
    """``[[g1, sigma], g2] == [g1, g2]``; holds when g1, g2 live on a cylinder that sigma moves off itself."""
    return commutator(commutator(g1, sigma), g2) == commutator(g1, g2)


def conjugacy_class_sizes(G: GroupSpec, g: TreeAutomorphism, radii: Sequence[int]) -> list[int]:
    """Number of distinct conjugates ``h g h^-1`` with ``h`` in ``B(r)`` for each radius."""
    out = []
    for r in radii:
        out.append(len({conjugate(g, h) for h, _ in G.ball(r)}))
    return out


def sorted_vertices(a: Iterable[Vertex]) -> list[Vertex]:
    return sorted(a, key=shortlex)
