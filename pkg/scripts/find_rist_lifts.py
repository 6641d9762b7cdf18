"""Search words in a subgroup K's generators equal to K-elements placed at each child.

Usage: python scripts/find_rist_lifts.py grigorchuk "ab ab" "ab ad ab ad" "ba da ba da"
Prints a JSON fragment suitable for the group file's ``rist_lifts`` field.
"""

import json
import sys

from treeconf.automorphisms import TreeAutomorphism, compose, invert
from treeconf.registry import load_group


def search(G, base: dict[str, TreeAutomorphism], max_len: int):
    labels = []
    elements = {}
    for name, k in sorted(base.items()):
        labels.append(name)
        elements[name] = k
        inv = invert(k)
        if inv != k:
            labels.append(name + "^-1")
            elements[name + "^-1"] = inv
    targets = {}
    for x in range(G.tree.degree(0)):
        for name, k in base.items():
            targets[TreeAutomorphism.placed(k, (x,))] = (x, name)
    found = {}
    seen = {TreeAutomorphism.identity(G.tree): ()}
    frontier = list(seen.items())
    for _ in range(max_len):
        nxt = []
        for g, word in frontier:
            for label in labels:
                h = compose(g, elements[label])
                if h in seen:
                    continue
                seen[h] = word + (label,)
                nxt.append((h, seen[h]))
                if h in targets and targets[h] not in found:
                    found[targets[h]] = seen[h]
        frontier = nxt
        if len(found) == len(targets):
            break
    return found, len(seen)


def main():
    name, *words = sys.argv[1:]
    G = load_group(name)
    base = {f"k{i + 1}": G.element(w) for i, w in enumerate(words)}
    found, size = search(G, base, max_len=10)
    lifts = {}
    for (x, k), word in sorted(found.items()):
        lifts.setdefault(str(x), {})[k] = " ".join(word)
    out = {"base": {f"k{i + 1}": w for i, w in enumerate(words)}, "lifts": lifts}
    print(json.dumps(out, indent=2))
    print(f"explored {size} elements; found {len(found)} of {len(base) * G.tree.degree(0)}", file=sys.stderr)


if __name__ == "__main__":
    main()
