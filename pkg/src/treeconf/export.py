"""Bit-stable DOT, CSV and JSON output."""

from __future__ import annotations

import json
import math
from pathlib import Path

from .automorphisms import Portrait
from .group_actions import GrowthTable, LabeledGraph, vertex_label
from .words_tree import vertex_str

PALETTE = ("black", "red", "blue", "darkgreen", "orange", "purple", "brown", "gray")


def _round(x: float) -> float | int:
    if math.isnan(x) or math.isinf(x):
        return str(x)
    return float(f"{x:.6g}")


def canonical(obj):
    """JSON-ready copy with floats rounded to 6 significant digits and tuples as lists."""
    if isinstance(obj, float):
        return _round(obj)
    if isinstance(obj, dict):
        return {str(k): canonical(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [canonical(v) for v in obj]
    if isinstance(obj, (set, frozenset)):
        return sorted(canonical(v) for v in obj)
    return obj


def to_json(obj) -> str:
    return json.dumps(canonical(obj), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def graph_to_dot(graph: LabeledGraph) -> str:
    colors = {label: PALETTE[i % len(PALETTE)] for i, label in enumerate(graph.labels)}
    lines = [f'digraph "{graph.name or graph.kind}" {{', "  node [shape=circle, fontsize=10];"]
    for i, p in enumerate(graph.payloads):
        attrs = [f'label="{vertex_label(p)}"']
        if i == graph.base:
            attrs.append("shape=doublecircle")
        if not graph.complete[i]:
            attrs.append("style=dashed")
        lines.append(f"  n{i} [{', '.join(attrs)}];")
    for u, label, v in graph.edge_list():
        lines.append(f'  n{u} -> n{v} [label="{label}", color={colors[label]}];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def portrait_to_dot(portrait: Portrait, name: str = "portrait") -> str:
    lines = [f'digraph "{name}" {{', "  node [shape=box, fontsize=10];"]
    for n, level in enumerate(portrait.levels):
        for v, perm in zip(_level_vertices(portrait, n), level):
            label = "".join(map(str, perm)) if any(i != x for i, x in enumerate(perm)) else "."
            lines.append(f'  "{vertex_str(v)}" [label="{label}"];')
            if v:
                lines.append(f'  "{vertex_str(v[:-1])}" -> "{vertex_str(v)}";')
    lines.append("}")
    return "\n".join(lines) + "\n"


def _level_vertices(portrait: Portrait, n: int):
    out = [()]
    for k in range(n):
        out = [v + (x,) for v in out for x in range(len(portrait.levels[k][0]))]
    return out


def graph_to_json(graph: LabeledGraph) -> dict:
    return {
        "name": graph.name,
        "kind": graph.kind,
        "labels": list(graph.labels),
        "base": graph.base,
        "radius": graph.radius,
        "vertices": [vertex_label(p) for p in graph.payloads],
        "complete": list(graph.complete),
        "edges": [[u, label, v] for u, label, v in graph.edge_list()],
    }


def growth_csv(table: GrowthTable) -> str:
    return table.to_csv()


EXPORTERS = {
    ("graph", "dot"): graph_to_dot,
    ("graph", "json"): lambda g: to_json(graph_to_json(g)),
    ("growth", "csv"): growth_csv,
    ("report", "json"): to_json,
}


def export(artifact, kind: str, fmt: str) -> str:
    try:
        fn = EXPORTERS[(kind, fmt)]
    except KeyError:
        raise ValueError(f"cannot export {kind} as {fmt}") from None
    return fn(artifact)


def write(path: str | Path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    return path
