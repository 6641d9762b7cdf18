"""Built-in groups and the group file format.

A group file looks like::

    {"tree": {"degrees": [2], "repeat": true},
     "generators": {"a": {"perm": [1, 0], "sections": ["e", "a"]}},
     "involutions": [...], "relations_smoke": [["b", "c", "d"]]}

Section names refer to other generators, ``"e"`` for the identity, or
``"x^-1"`` for an inverse.  Optional ``rist_lifts`` describe a subgroup K
with K x ... x K inside K (placed copies at every child), which yields
rigid-stabilizer elements at every vertex; every lift is re-verified on load.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path

from .automorphisms import TreeAutomorphism, compose, in_rigid_stabilizer, invert, is_trivial, order
from .group_actions import GroupSpec, level_schreier
from .words_tree import TreeSpec, Vertex

INFINITE_ORDER_SCAN = 64
TRANSITIVITY_LEVEL = 8


class RegistryError(ValueError):
    pass


@dataclass(frozen=True)
class RistLifts:
    """Base words for K and, per child letter, K-words for the placed copies."""

    base: dict[str, str]
    lifts: dict[int, dict[str, str]]

    def word_at(self, name: str, v: Vertex) -> tuple[str, ...]:
        """Word in K-base names for ``name`` placed at ``v``."""
        word: tuple[str, ...] = (name,)
        for x in reversed(v):
            out: list[str] = []
            for letter in word:
                inverse = letter.endswith("^-1")
                core = letter[:-3] if inverse else letter
                sub = self.lifts[x][core].split()
                if inverse:
                    sub = [s[:-3] if s.endswith("^-1") else s + "^-1" for s in reversed(sub)]
                out.extend(sub)
            word = tuple(out)
        return word


@dataclass
class RegistryEntry:
    group: GroupSpec
    level_transitive: bool = False
    rist_lifts: RistLifts | None = None
    notes: list[str] = field(default_factory=list)
    _base_elements: dict[str, TreeAutomorphism] = field(default_factory=dict)

    def rist_hints(self, v: Vertex) -> list[TreeAutomorphism]:
        """Nontrivial elements of the rigid stabilizer of ``v`` known from structure."""
        if self.rist_lifts is None:
            return []
        out = []
        for name in sorted(self.rist_lifts.base):
            g = TreeAutomorphism.placed(self._base_elements[name], tuple(v))
            if not in_rigid_stabilizer(g, v):
                raise RegistryError(f"hint {name} at {v} fails rigid-stabilizer membership")
            out.append(g)
        return out

    def hint_word(self, name: str, v: Vertex) -> tuple[str, ...]:
        """Word in the group generators for base element ``name`` placed at ``v``."""
        G = self.group
        out: list[str] = []
        for letter in self.rist_lifts.word_at(name, v):
            inverse = letter.endswith("^-1")
            core = letter[:-3] if inverse else letter
            w = G.parse_word(self.rist_lifts.base[core])
            if inverse:
                w = tuple(G.label_inverse(s) for s in reversed(w))
            out.extend(w)
        return tuple(out)


def _parse_generators(tree: TreeSpec, gens: dict) -> dict[str, TreeAutomorphism]:
    if not gens:
        raise RegistryError("no generators")
    table = {}
    for name, body in gens.items():
        if name in ("e", "1", "id") or name.endswith("^-1"):
            raise RegistryError(f"reserved generator name {name!r}")
        try:
            table[name] = (int(body.get("level", 0)), tuple(body["perm"]), tuple(body["sections"]))
        except (KeyError, TypeError) as exc:
            raise RegistryError(f"generator {name}: missing field {exc}") from None
    out = {}
    for name in table:
        try:
            out[name] = TreeAutomorphism.from_table(tree, table, name)
        except ValueError as exc:
            raise RegistryError(f"generator {name}: {exc}") from None
    return out


def entry_from_json(data: dict, check_transitivity: bool = True) -> RegistryEntry:
    try:
        tree = TreeSpec.from_json(data["tree"])
        name = data.get("name", "group")
        gens = _parse_generators(tree, data["generators"])
    except KeyError as exc:
        raise RegistryError(f"missing field {exc}") from None
    except ValueError as exc:
        raise RegistryError(str(exc)) from None
    G = GroupSpec(name, tree, gens)
    notes = []
    for label in data.get("involutions", []):
        if not is_trivial(compose(gens[label], gens[label])):
            raise RegistryError(f"relation check failed: {label}^2 != 1")
        notes.append(f"{label}^2 = 1")
    for rel in data.get("relations_smoke", []):
        if not is_trivial(G.evaluate(rel)):
            raise RegistryError(f"relation check failed: {''.join(rel)} != 1")
        notes.append(f"{''.join(rel)} = 1")
    for label in data.get("infinite_order", []):
        if order(gens[label], INFINITE_ORDER_SCAN) is not None:
            raise RegistryError(f"{label} has finite order")
        notes.append(f"{label}^n != 1 for n <= {INFINITE_ORDER_SCAN}")
    transitive = bool(data.get("level_transitive", False))
    if transitive and check_transitivity:
        for n in range(1, TRANSITIVITY_LEVEL + 1):
            if tree.level_size(n) > 2**16:
                break
            graph = level_schreier(G, n)
            if len(graph.distances_from(0)) != len(graph):
                raise RegistryError(f"not transitive on level {n}")
        notes.append(f"level-transitive up to level {TRANSITIVITY_LEVEL}")
    entry = RegistryEntry(G, transitive, notes=notes)
    if "rist_lifts" in data:
        raw = data["rist_lifts"]
        lifts = RistLifts(dict(raw["base"]), {int(x): dict(m) for x, m in raw["lifts"].items()})
        entry.rist_lifts = lifts
        entry._base_elements = {k: G.element(w) for k, w in lifts.base.items()}
        _verify_lifts(entry)
        notes.append("rist lifts verified")
    return entry


def _verify_lifts(entry: RegistryEntry):
    lifts = entry.rist_lifts
    base = entry._base_elements
    tree = entry.group.tree
    if set(lifts.lifts) != set(range(tree.degree(0))):
        raise RegistryError("rist lifts must cover every child letter")
    for x, words in lifts.lifts.items():
        for name, word in words.items():
            value = TreeAutomorphism.identity(tree)
            for letter in word.split():
                inverse = letter.endswith("^-1")
                core = letter[:-3] if inverse else letter
                k = base[core]
                value = compose(value, invert(k) if inverse else k)
            if value != TreeAutomorphism.placed(base[name], (x,)):
                raise RegistryError(f"rist lift of {name} at child {x} is wrong")
    for name, k in base.items():
        if is_trivial(k):
            raise RegistryError(f"rist base element {name} is trivial")


def builtin_names() -> list[str]:
    files = resources.files("treeconf") / "groups"
    return sorted(p.name[:-5] for p in files.iterdir() if p.name.endswith(".json"))


@lru_cache(maxsize=None)
def load_entry(name_or_path: str) -> RegistryEntry:
    path = Path(name_or_path)
    if path.suffix == ".json" and path.exists():
        data = json.loads(path.read_text())
        data.setdefault("name", path.stem)
    else:
        if name_or_path not in builtin_names():
            raise RegistryError(f"unknown group {name_or_path!r}; built-ins: {', '.join(builtin_names())}")
        text = (resources.files("treeconf") / "groups" / f"{name_or_path}.json").read_text()
        data = json.loads(text)
    return entry_from_json(data)


def load_group(name_or_path: str) -> GroupSpec:
    return load_entry(name_or_path).group


def entry_for(G: GroupSpec) -> RegistryEntry | None:
    try:
        entry = load_entry(G.name)
    except RegistryError:
        return None
    return entry if entry.group is G or entry.group.generators == G.generators else None
