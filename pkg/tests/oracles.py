"""Reference actions written directly from the recursive definitions.

Nothing here touches the automaton code: each generator is a Python function
on letter tuples, so agreement with ``act_vertex`` is independent evidence.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np


def _grig(name, w):
    if not w:
        return w
    x, rest = w[0], w[1:]
    if name == "a":
        return (1 - x,) + rest
    if name == "b":
        return (0,) + _grig("a", rest) if x == 0 else (1,) + _grig("c", rest)
    if name == "c":
        return (0,) + _grig("a", rest) if x == 0 else (1,) + _grig("d", rest)
    if name == "d":
        return (0,) + rest if x == 0 else (1,) + _grig("b", rest)
    raise KeyError(name)


def _adding(name, w):
    if name == "a^-1":
        # subtract one with borrow
        out = list(w)
        for i, x in enumerate(out):
            if x == 1:
                out[i] = 0
                return tuple(out)
            out[i] = 1
        return tuple(out)
    out = list(w)
    for i, x in enumerate(out):
        if x == 0:
            out[i] = 1
            return tuple(out)
        out[i] = 0
    return tuple(out)


def _gs(name, w):
    if not w:
        return w
    x, rest = w[0], w[1:]
    if name == "a":
        return ((x + 1) % 3,) + rest
    if name == "a^-1":
        return ((x - 1) % 3,) + rest
    if name in ("t", "t^-1"):
        inv = name == "t^-1"
        if x == 0:
            return (0,) + _gs("a^-1" if inv else "a", rest)
        if x == 1:
            return (1,) + _gs("a" if inv else "a^-1", rest)
        return (2,) + _gs(name, rest)
    raise KeyError(name)


def _basilica(name, w):
    if not w:
        return w
    x, rest = w[0], w[1:]
    if name == "a":
        return (0,) + rest if x == 0 else (1,) + _basilica("b", rest)
    if name == "a^-1":
        return (0,) + rest if x == 0 else (1,) + _basilica("b^-1", rest)
    if name == "b":
        return (1,) + rest if x == 0 else (0,) + _basilica("a", rest)
    if name == "b^-1":
        return (1,) + _basilica("a^-1", rest) if x == 0 else (0,) + rest
    raise KeyError(name)


REFERENCE = {"grigorchuk": (_grig, 2), "adding_machine": (_adding, 2), "gupta_sidki_3": (_gs, 3), "basilica": (_basilica, 2)}


def act_word(group: str, word, w):
    """Apply a word (rightmost letter first) to the vertex ``w``."""
    fn, _ = REFERENCE[group]
    for s in reversed(list(word)):
        w = fn(s, tuple(w))
    return tuple(w)


def vertices(d: int, depth: int):
    return itertools.product(range(d), repeat=depth)


@lru_cache(maxsize=None)
def level_perm(group: str, label: str, depth: int) -> np.ndarray:
    """Index permutation of level ``depth`` (lex order) induced by one generator."""
    _, d = REFERENCE[group]
    verts = list(vertices(d, depth))
    index = {v: i for i, v in enumerate(verts)}
    return np.array([index[act_word(group, (label,), v)] for v in verts])


def word_perm(group: str, word, depth: int) -> np.ndarray:
    _, d = REFERENCE[group]
    out = np.arange(d**depth)
    for s in reversed(list(word)):
        out = level_perm(group, s, depth)[out]
    return out


def same_action(group: str, word1, word2, depth: int) -> bool:
    return bool(np.array_equal(word_perm(group, word1, depth), word_perm(group, word2, depth)))


def acts_trivially(group: str, word, depth: int) -> bool:
    return same_action(group, word, (), depth)


def brute_orbit(perms, start: frozenset) -> set[frozenset]:
    """Orbit of a subset under permutations, by closure over all products."""
    orbit = {start}
    changed = True
    while changed:
        changed = False
        for s in list(orbit):
            for p in perms:
                t = frozenset(p[i] for i in s)
                if t not in orbit:
                    orbit.add(t)
                    changed = True
    return orbit
