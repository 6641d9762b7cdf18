"""Trees of words: level schedules, vertices, antichains and eventually periodic rays.

A vertex is a plain tuple of letters; letter ``i`` of a vertex is drawn from
``range(tree.degree(i))``.  Antichains are finite sets of pairwise independent
vertices and stand for the clopen set obtained as the union of their cylinders.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

Vertex = tuple[int, ...]
ROOT: Vertex = ()


class TreeError(ValueError):
    pass


@dataclass(frozen=True)
class TreeSpec:
    """Degree schedule of a spherically homogeneous rooted tree.

    ``degrees[i]`` is the number of children of a level-``i`` vertex for
    ``i < len(degrees)``; from ``tail_start`` on the list repeats forever.
    Level classes (indices into ``degrees``) are what automaton states are
    tagged with on non-regular trees.
    """

    degrees: tuple[int, ...]
    tail_start: int = 0
    degenerate: bool = False

    def __post_init__(self):
        degrees = tuple(int(d) for d in self.degrees)
        if not degrees:
            raise TreeError("empty degree schedule")
        if not 0 <= self.tail_start < len(degrees):
            raise TreeError(f"tail_start {self.tail_start} outside schedule of length {len(degrees)}")
        low = 1 if self.degenerate else 2
        if any(d < low for d in degrees):
            raise TreeError(f"degrees must be >= {low}: {degrees}")
        if len(set(degrees)) == 1:
            # collapse to the canonical regular form
            degrees, tail = (degrees[0],), 0
        else:
            tail = self.tail_start
        object.__setattr__(self, "degrees", degrees)
        object.__setattr__(self, "tail_start", tail)

    @classmethod
    def regular(cls, d: int) -> TreeSpec:
        return cls((d,))

    @property
    def is_regular(self) -> bool:
        return len(self.degrees) == 1

    def level_class(self, level: int) -> int:
        if level < len(self.degrees):
            return level
        period = len(self.degrees) - self.tail_start
        return self.tail_start + (level - self.tail_start) % period

    def next_class(self, cls: int) -> int:
        return cls + 1 if cls + 1 < len(self.degrees) else self.tail_start

    def class_degree(self, cls: int) -> int:
        return self.degrees[cls]

    def degree(self, level: int) -> int:
        return self.degrees[self.level_class(level)]

    def level_size(self, n: int) -> int:
        size = 1
        for i in range(n):
            size *= self.degree(i)
        return size

    def vertices(self, n: int) -> Iterator[Vertex]:
        """Level ``n`` in lexicographic order."""
        return itertools.product(*(range(self.degree(i)) for i in range(n)))

    def children(self, v: Vertex) -> list[Vertex]:
        return [v + (x,) for x in range(self.degree(len(v)))]

    def check_vertex(self, v: Sequence[int]) -> Vertex:
        v = tuple(v)
        for i, x in enumerate(v):
            if not 0 <= x < self.degree(i):
                raise TreeError(f"letter {x} out of range at level {i} (degree {self.degree(i)})")
        return v

    def to_json(self) -> dict:
        out = {"degrees": list(self.degrees), "repeat": True}
        if self.tail_start:
            out["tail_start"] = self.tail_start
        if self.degenerate:
            out["degenerate"] = True
        return out

    @classmethod
    def from_json(cls, data: dict) -> TreeSpec:
        if not data.get("repeat", True):
            raise TreeError("finite-depth trees are not supported; set repeat to true")
        return cls(tuple(data["degrees"]), int(data.get("tail_start", 0)), bool(data.get("degenerate", False)))


BINARY = TreeSpec.regular(2)


def vertex_str(v: Vertex) -> str:
    if not v:
        return "ε"
    if all(x < 10 for x in v):
        return "".join(map(str, v))
    return ".".join(map(str, v))


def parse_vertex(text: str) -> Vertex:
    text = text.strip()
    if text in ("", "ε", "e", "root"):
        return ROOT
    if "." in text:
        return tuple(int(x) for x in text.split("."))
    return tuple(int(x) for x in text)


def shortlex(v: Vertex) -> tuple[int, Vertex]:
    return (len(v), v)


class Relation(enum.Enum):
    EQUAL = "equal"
    V_BELOW_W = "v_below_w"
    W_BELOW_V = "w_below_v"
    DISJOINT = "disjoint"


def is_prefix(u: Vertex, v: Vertex) -> bool:
    return len(u) <= len(v) and v[: len(u)] == u


def cylinder_relation(v: Vertex, w: Vertex, tree: TreeSpec | None = None) -> Relation:
    if tree is not None:
        tree.check_vertex(v)
        tree.check_vertex(w)
    if v == w:
        return Relation.EQUAL
    if is_prefix(w, v):
        return Relation.V_BELOW_W
    if is_prefix(v, w):
        return Relation.W_BELOW_V
    return Relation.DISJOINT


def independent(v: Vertex, w: Vertex) -> bool:
    return cylinder_relation(v, w) is Relation.DISJOINT


@dataclass(frozen=True)
class Antichain:
    """Pairwise independent vertices, stored in shortlex order."""

    vertices: tuple[Vertex, ...] = ()

    def __post_init__(self):
        vs = tuple(sorted(set(tuple(v) for v in self.vertices), key=shortlex))
        for a, b in itertools.combinations(vs, 2):
            if not independent(a, b):
                raise TreeError(f"vertices {vertex_str(a)} and {vertex_str(b)} are not independent")
        object.__setattr__(self, "vertices", vs)

    @classmethod
    def of(cls, vertices: Iterable[Sequence[int]]) -> Antichain:
        return cls(tuple(tuple(v) for v in vertices))

    def __iter__(self):
        return iter(self.vertices)

    def __len__(self):
        return len(self.vertices)

    def __contains__(self, v) -> bool:
        return tuple(v) in self.vertices

    @property
    def depth(self) -> int:
        return max((len(v) for v in self.vertices), default=0)

    def covers(self, v: Vertex) -> bool:
        """True when the cylinder of ``v`` lies inside the union (for a normalized antichain)."""
        return any(is_prefix(a, v) for a in self.vertices)

    def meets(self, v: Vertex) -> bool:
        return any(not independent(a, v) for a in self.vertices)

    def __str__(self):
        return "{" + ", ".join(vertex_str(v) for v in self.vertices) + "}"


def normalize(vertices: Iterable[Vertex], tree: TreeSpec) -> Antichain:
    """Coarsest antichain with the same union of cylinders.

    Input vertices may be comparable; vertices below others are dropped and
    complete sibling families are merged into their parent.
    """
    vs = sorted(set(tuple(v) for v in vertices), key=shortlex)
    kept: list[Vertex] = []
    for v in vs:
        if not any(is_prefix(a, v) for a in kept):
            kept.append(v)
    current = set(kept)
    changed = True
    while changed:
        changed = False
        for v in sorted(current, key=shortlex, reverse=True):
            if not v or v not in current:
                continue
            parent = v[:-1]
            family = tree.children(parent)
            if all(c in current for c in family):
                current.difference_update(family)
                current.add(parent)
                changed = True
    return Antichain(tuple(current))


def complement_antichain(a: Antichain, tree: TreeSpec) -> Antichain:
    """Coarsest antichain whose cylinders partition the complement of ``a``."""
    verts = a.vertices
    if ROOT in verts:
        return Antichain()
    out: list[Vertex] = []

    def walk(u: Vertex):
        if any(is_prefix(x, u) for x in verts):
            return
        if not any(is_prefix(u, x) for x in verts):
            out.append(u)
            return
        for c in tree.children(u):
            walk(c)

    walk(ROOT)
    return Antichain(tuple(out))


def union(a: Antichain, b: Antichain, tree: TreeSpec) -> Antichain:
    return normalize(a.vertices + b.vertices, tree)


def disjoint(a: Antichain, b: Antichain) -> bool:
    return all(independent(x, y) for x in a.vertices for y in b.vertices)


def first_meeting_pair(a: Antichain, b: Antichain) -> tuple[Vertex, Vertex] | None:
    for x in a.vertices:
        for y in b.vertices:
            if not independent(x, y):
                return x, y
    return None


def same_set(a: Antichain, b: Antichain, tree: TreeSpec) -> bool:
    return normalize(a.vertices, tree) == normalize(b.vertices, tree)


def subset(a: Antichain, b: Antichain, tree: TreeSpec) -> bool:
    nb = normalize(b.vertices, tree)
    return all(nb.covers(v) for v in a.vertices)


def refine_to_depth(a: Antichain, n: int, tree: TreeSpec) -> list[Vertex]:
    """Level-``n`` vertices whose cylinders lie in the union of ``a`` (all of ``a`` must have depth <= n)."""
    out = []
    for v in a.vertices:
        if len(v) > n:
            raise TreeError(f"vertex {vertex_str(v)} deeper than {n}")
        tails = itertools.product(*(range(tree.degree(i)) for i in range(len(v), n)))
        out.extend(v + t for t in tails)
    return sorted(out)


def partition_check(parts: Iterable[Vertex], tree: TreeSpec, depth: int) -> bool:
    """Brute force: do the cylinders of ``parts`` cover ``L(depth)`` exactly once?"""
    counts = dict.fromkeys(tree.vertices(depth), 0)
    for v in parts:
        if len(v) > depth:
            return False
        for w in counts:
            if is_prefix(v, w):
                counts[w] += 1
    return all(c == 1 for c in counts.values())


@dataclass(frozen=True)
class Ray:
    """Eventually periodic boundary point ``preperiod · period^∞`` of a regular tree.

    Always stored in canonical form: primitive period, shortest preperiod.
    """

    preperiod: tuple[int, ...]
    period: tuple[int, ...]

    def __post_init__(self):
        pre = tuple(self.preperiod)
        per = tuple(self.period)
        if not per:
            raise TreeError("ray period must be nonempty")
        n = len(per)
        for k in range(1, n + 1):
            if n % k == 0 and per[:k] * (n // k) == per:
                per = per[:k]
                break
        while pre and pre[-1] == per[-1]:
            pre = pre[:-1]
            per = per[-1:] + per[:-1]
        object.__setattr__(self, "preperiod", pre)
        object.__setattr__(self, "period", per)

    @classmethod
    def constant(cls, letter: int) -> Ray:
        return cls((), (letter,))

    @classmethod
    def parse(cls, text: str) -> Ray:
        """``"01(10)"`` is 01 followed by 10 repeated; ``"1^inf"`` is the constant ray."""
        text = text.strip().replace("∞", "inf")
        if text.endswith("^inf"):
            body = text[: -len("^inf")]
            if body.endswith(")") and "(" in body:
                pre, per = body[:-1].split("(")
                return cls(parse_vertex(pre), parse_vertex(per))
            return cls((), parse_vertex(body))
        if "(" in text and text.endswith(")"):
            pre, per = text[:-1].split("(")
            return cls(parse_vertex(pre), parse_vertex(per))
        raise TreeError(f"cannot parse ray {text!r}")

    def letter(self, i: int) -> int:
        if i < len(self.preperiod):
            return self.preperiod[i]
        return self.period[(i - len(self.preperiod)) % len(self.period)]

    def prefix(self, n: int) -> Vertex:
        return tuple(self.letter(i) for i in range(n))

    def check(self, tree: TreeSpec) -> Ray:
        if not tree.is_regular:
            raise TreeError("rays are exact only on regular trees; use a finite truncation")
        tree.check_vertex(self.preperiod)
        tree.check_vertex(self.period)
        return self

    def __str__(self):
        pre = vertex_str(self.preperiod) if self.preperiod else ""
        return f"{pre}({vertex_str(self.period)})"
