"""Scenario files: one task on one group, with budgets and output paths.

A scenario is JSON::

    {"group": "grigorchuk", "task": "growth",
     "params": {"ray": "(1)"}, "budgets": {"radius": 64, "up_to": 32},
     "outputs": {"dir": "out/growth"}, "expect": "confirmed"}

``run_scenario`` returns a report dict (verdict strings carry their scale)
plus the artifact texts to write.  Reports contain no timings or paths, so
two runs of the same scenario give byte-identical files.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from . import bratteli as br
from . import confinement as cf
from . import group_actions as ga
from . import urs_lab as ul
from .automorphisms import bounded_check, portrait
from .export import graph_to_dot, graph_to_json, portrait_to_dot, to_json
from .registry import load_entry
from .words_tree import Antichain, Ray, parse_vertex, vertex_str

TASKS = ("schreier", "growth", "germ", "cayley", "confine", "displace", "engine", "urs", "bratteli", "cutset")


class ScenarioError(ValueError):
    pass


@dataclass
class Scenario:
    group: str
    task: str
    params: dict = field(default_factory=dict)
    budgets: dict = field(default_factory=dict)
    outputs: dict = field(default_factory=dict)
    expect: str | None = None
    seed: int | None = None

    @classmethod
    def from_dict(cls, data: dict) -> Scenario:
        if not isinstance(data, dict):
            raise ScenarioError("scenario must be a JSON object")
        unknown = set(data) - {"group", "task", "params", "budgets", "outputs", "expect", "seed", "name"}
        if unknown:
            raise ScenarioError(f"unknown scenario fields: {sorted(unknown)}")
        for key in ("group", "task"):
            if key not in data:
                raise ScenarioError(f"missing field {key!r}")
        if data["task"] not in TASKS:
            raise ScenarioError(f"unknown task {data['task']!r}; expected one of {', '.join(TASKS)}")
        budgets = dict(data.get("budgets", {}))
        for k, v in budgets.items():
            if not isinstance(v, int) or isinstance(v, bool) or v <= 0:
                raise ScenarioError(f"budget {k} must be a positive integer")
        expect = data.get("expect")
        if expect not in (None, "confirmed", "refuted"):
            raise ScenarioError("expect must be 'confirmed' or 'refuted'")
        return cls(
            data["group"], data["task"], dict(data.get("params", {})), budgets, dict(data.get("outputs", {})), expect,
            data.get("seed"),
        )

    @classmethod
    def load(cls, path: str | Path) -> Scenario:
        try:
            data = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise ScenarioError(f"{path}: not valid JSON ({exc})") from None
        return cls.from_dict(data)

    def budget(self, key: str, default: int) -> int:
        return int(self.budgets.get(key, default))


@dataclass
class Outcome:
    report: dict
    artifacts: dict[str, str]
    refuted: bool = False

    def write(self, directory: str | Path) -> list[Path]:
        d = Path(directory)
        d.mkdir(parents=True, exist_ok=True)
        out = [d / "report.json"]
        out[0].write_text(to_json(self.report))
        for name, text in sorted(self.artifacts.items()):
            p = d / name
            p.write_text(text)
            out.append(p)
        return out


def parse_oracle(text: str, G: ga.GroupSpec) -> cf.Oracle:
    """``point:(1)``, ``germ:1^inf``, ``rigid:01``, ``fixator:0,10``, ``words:ab|1``, ``whole``; ``+`` joins several."""
    if "+" in text:
        return cf.AnyOf(tuple(parse_oracle(t, G) for t in text.split("+")))
    kind, _, arg = text.partition(":")
    kind = kind.strip()
    if kind in ("point", "germ"):
        ray = Ray.parse(arg).check(G.tree)
        return cf.SubgroupOracle.point_stabilizer(ray) if kind == "point" else cf.SubgroupOracle.germ_stabilizer(ray)
    if kind == "rigid":
        return cf.SubgroupOracle.rigid_stabilizer(G.tree.check_vertex(parse_vertex(arg)))
    if kind == "fixator":
        return cf.SubgroupOracle.fixator(Antichain.of(parse_vertex(v) for v in arg.split(",")))
    if kind == "words":
        return cf.SubgroupOracle.word_list([G.element(w) for w in arg.split("|")])
    if kind == "whole":
        return cf.SubgroupOracle.whole()
    raise ScenarioError(f"cannot parse oracle {text!r}")


def _elements(G, words):
    if isinstance(words, str):
        words = [w for w in words.split(",") if w.strip()]
    return [G.element(w) for w in words], [w.strip() for w in words]


def _ray(s: Scenario, G) -> Ray:
    return Ray.parse(s.params.get("ray", "(1)")).check(G.tree)


def run_scenario(s: Scenario) -> Outcome:
    try:
        entry = load_entry(s.group)
    except ValueError as exc:
        raise ScenarioError(f"group {s.group!r}: {exc}") from None
    G = entry.group
    handler = globals()[f"_task_{s.task}"]
    report, artifacts, refuted = handler(s, G)
    report = {"group": G.name, "task": s.task, **report}
    if s.expect == "confirmed" and refuted:
        report["expectation"] = "violated"
    elif s.expect:
        report["expectation"] = "met" if (s.expect == "refuted") == refuted else "violated"
    return Outcome(report, artifacts, refuted and s.expect == "confirmed")


def _task_schreier(s, G):
    n = s.budget("level", 3)
    graph = ga.level_schreier(G, n, cap=s.budget("cap", ga.DEFAULT_LEVEL_CAP))
    components = 0
    seen = set()
    for v in range(len(graph)):
        if v not in seen:
            components += 1
            seen |= set(graph.distances_from(v))
    report = {"level": n, "vertices": len(graph), "edges": len(graph.edge_list()), "orbits": components,
              "verdict": f"{'transitive' if components == 1 else 'intransitive'}(level={n})"}
    return report, {"schreier.dot": graph_to_dot(graph)}, False


def _task_cayley(s, G):
    R = s.budget("radius", 3)
    graph = ga.cayley_ball(G, R)
    sizes = [len(G.ball(r)) for r in range(R + 1)]
    return {"radius": R, "ball_sizes": sizes, "verdict": f"|B({R})|={sizes[-1]}"}, {"cayley.dot": graph_to_dot(graph)}, False


def _task_growth(s, G):
    ray = _ray(s, G)
    R = s.budget("radius", 64)
    up_to = s.budget("up_to", R // 2)
    graph = ga.orbital_ball(G, ray, R)
    table = ga.graph_growth(graph, up_to)
    fit = ga.fit_growth_degree(table)
    report = {"ray": str(ray), "radius": R, "up_to": up_to, "fit": fit}
    try:
        bound = ga.leud_upper(table)
        report["leud_upper"] = {"bound": bound.bound, "rule": bound.rule}
        report["verdict"] = f"growth_degree({fit['degree']}, window={fit['window']}, R={R})"
    except ga.EvidenceInsufficient as exc:
        report["verdict"] = f"inconclusive({exc})"
    embed_R = s.params.get("embedding_radius")
    if embed_R:
        report["embedding"] = str(ga.ball_embedding_test(G, graph, int(embed_R)))
    return report, {"growth.csv": table.to_csv(), "orbital.dot": graph_to_dot(graph)}, False


def _task_germ(s, G):
    ray = _ray(s, G)
    R = s.budget("radius", 8)
    germ = ga.germ_ball(G, ray, R)
    problems = ga.verify_covering(germ)
    prof = ga.fiber_profile(G, ray, R)
    report = {
        "ray": str(ray),
        "radius": R,
        "germ_vertices": len(germ.graph),
        "orbital_vertices": len(germ.orbital),
        "covering_problems": problems,
        "fibers_by_distance": {str(k): list(v) for k, v in prof.sizes_by_distance.items()},
        "verdict": f"{'covering' if not problems else 'not_covering'}; {prof}",
    }
    return report, {"germ.dot": graph_to_dot(germ.graph), "germ.json": to_json(graph_to_json(germ.graph))}, False


def _task_cutset(s, G):
    B = s.budget("bound", 3)
    chain = s.budget("min_chain", 20)
    if s.params.get("grid"):
        w = int(s.params["grid"])
        graph = ga.grid_graph(w, w)
    else:
        graph = ga.orbital_ball(G, _ray(s, G), s.budget("radius", 511))
    cert = ga.cut_set_sequence(graph, B, chain)
    report = {"graph": graph.name, "vertices": len(graph), "bound": B, "min_chain_length": chain}
    if cert is None:
        report["verdict"] = f"not_found(B={B}, min_chain={chain})"
        R = s.budget("up_to", 16)
        try:
            bound = ga.leud_upper(ga.graph_growth(graph, R))
            report["leud_upper"] = {"bound": bound.bound, "rule": bound.rule}
        except (ga.EvidenceInsufficient, ga.NoAdmissibleCenter) as exc:
            report["leud_upper"] = {"bound": None, "rule": f"inconclusive: {exc}"}
    else:
        report["verdict"] = f"certificate(chain={len(cert)}, max_boundary={max(cert.boundaries)}, B={B})"
        report["leud_upper"] = {"bound": 1, "rule": "cut_sets"}
        report["cuts"] = list(cert.cuts)
    return report, {}, False


def _task_confine(s, G):
    H = parse_oracle(s.params.get("oracle", "point:(1)"), G)
    P, labels = _elements(G, s.params.get("P", ["b", "c", "d"]))
    L = s.budget("L", 8)
    verdict = cf.check_confining(P, H, G, L)
    report = {"oracle": H.name, "P": labels, "check": verdict.to_json(), "verdict": str(verdict)}
    refuted = not verdict.confirmed
    if s.params.get("refine") and verdict.confirmed:
        r = cf.refine_confining(P, H, G, L, labels)
        report["refined"] = {"P": list(r.labels), "check": r.verdict.to_json(), "candidates": r.candidates_tried}
        report["verdict"] = f"refined: {r.verdict}"
        refuted = not r.verdict.confirmed
    return report, {}, refuted


def _task_displace(s, G):
    P, labels = _elements(G, s.params.get("P", ["a"]))
    depth = s.budget("depth", 8)
    if "omega" in s.params:
        omega = tuple(Antichain.of(parse_vertex(v) for v in part.split(",")) for part in s.params["omega"])
        cfg = cf.DisplacementConfig(tuple(P), omega, tuple(labels))
    else:
        try:
            cfg = cf.build_displacement(P, depth, labels)
        except cf.OrderTwoObstruction as exc:
            return {"verdict": f"order_two_obstruction({exc.label})", "depth": depth}, {}, False
        except cf.DepthBudgetExceeded as exc:
            return {"verdict": f"depth_budget_exceeded(depth={depth})", "detail": str(exc)}, {}, False
    rep = cf.verify_displacement(cfg)
    report = {"config": {"omega": cfg.to_json()["omega"], "P": labels}, "verification": rep.to_json(),
              "verdict": f"{'verified' if rep.ok else 'not_verified'}({rep}, depth={depth})"}
    return report, {}, not rep.ok


def _task_engine(s, G):
    H = parse_oracle(s.params.get("oracle", "point:(1)"), G)
    P, labels = _elements(G, s.params.get("P", ["b", "c", "d"]))
    L = s.budget("L", 8)
    depth = s.budget("depth", 8)
    check = cf.check_confining(P, H, G, L)
    if not check.confirmed:
        return {"verdict": str(check)}, {}, True
    if s.params.get("refine", True):
        r = cf.refine_confining(P, H, G, L, labels)
        if not r.ok:
            return {"verdict": f"refine_failed({r.verdict})"}, {}, True
        P, labels = list(r.P), list(r.labels)
    cfg = cf.build_displacement(P, depth, labels)
    report = cf.commutator_engine(
        cfg, H, G, L, rist_radius=s.budget("rist_radius", 3), max_sample=s.budget("max_sample", 40)
    )
    data = report.to_json()
    return {"engine": data, "verdict": report.verdict, "ledger_all_pass": report.all_pass}, {}, False


def _task_urs(s, G):
    mode = s.params.get("mode", "sandwich")
    n = s.budget("n", 3)
    L = s.budget("L", 4)
    if mode == "orbit":
        S1 = ul.Fingerprint.of(n, [parse_vertex(v) for v in s.params.get("S1", [])])
        S2 = ul.Fingerprint.of(n, [parse_vertex(v) for v in s.params.get("S2", [])])
        eq = ul.subset_orbit_equal(G, S1, S2)
        return {"S1": str(S1), "S2": str(S2), "verdict": f"{'same_orbit' if eq else 'different_orbits'}(n={n})"}, {}, False
    H = parse_oracle(s.params.get("oracle", "point:(1)"), G)
    if mode == "fingerprint":
        fps = {
            "rist_containment": ul.rist_containment_fingerprint(G, H, n, L),
            "fix_level": ul.fix_level(G, H, n, L),
        }
        csv = ul.FINGERPRINT_CSV_HEADER + "\n" + "".join(f"{fp.csv_line(G.tree)}\n" for fp in fps.values())
        report = {k: [vertex_str(v) for v in fp.sorted()] for k, fp in fps.items()}
        report["verdict"] = f"fingerprints(n={n}, L={L})"
        return report, {"fingerprints.csv": csv}, False
    ledger = ul.sandwich_check(G, H, n, L)
    return {"oracle": H.name, "sandwich": ledger.to_json(), "verdict": str(ledger)}, {}, not ledger.ok


def _task_bratteli(s, G):
    horizon = s.budget("horizon", 10)
    if "diagram" in s.params:
        D = br.load_diagram(s.params["diagram"])
        h = br.BoundedTypeHomeo(D, tuple((tuple(g), tuple(e)) for g, e in s.params["rules"]))
        prof = br.singularity_profile(h, horizon)
        report = {"rules": len(h.rules), "level_totals": prof.level_totals(), "verdict": prof.verdict}
    else:
        g = G.element(s.params.get("element", "a"))
        prof = br.singularity_profile(g, horizon)
        report = {
            "element": s.params.get("element", "a"),
            "level_totals": prof.level_totals(),
            "activity": list(prof.activity),
            "singular_rays": [str(r) for r in prof.singular_rays or ()],
            "bounded_check": str(bounded_check(g, horizon)),
            "verdict": prof.verdict,
        }
    return report, {"profile.csv": prof.to_csv()}, False


def portrait_artifact(G, word: str, depth: int) -> str:
    return portrait_to_dot(portrait(G.element(word), depth), name=word)
