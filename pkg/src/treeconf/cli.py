"""Command-line interface.

Exit codes: 0 success, 1 input or runtime error, 2 a refutation where
confirmation was expected (``--expect confirmed`` or a scenario ``expect``).
"""

from __future__ import annotations

import sys
from pathlib import Path

import click

from . import bratteli as br
from . import confinement as cf
from . import group_actions as ga
from . import urs_lab as ul
from .automorphisms import TreeAutomorphism, bounded_check, nucleus, order
from .export import export, portrait_to_dot, to_json, write
from .registry import RegistryError, builtin_names, load_entry
from .scenario import Scenario, ScenarioError, parse_oracle, run_scenario
from .words_tree import Antichain, Ray, parse_vertex

EXIT_REFUTED = 2


def _emit(text: str, out: str | None):
    if out:
        write(out, text)
        click.echo(f"wrote {out}", err=True)
    else:
        click.echo(text, nl=not text.endswith("\n"))


def _group(name):
    try:
        return load_entry(name)
    except (RegistryError, ValueError, FileNotFoundError) as exc:
        raise click.UsageError(f"cannot load group {name!r}: {exc}") from None


def _positive(ctx, param, value):
    if value is not None and value <= 0:
        raise click.BadParameter("must be a positive integer")
    return value


def _nonneg(ctx, param, value):
    if value is not None and value < 0:
        raise click.BadParameter("must be non-negative")
    return value


def _ray(text: str, tree) -> Ray:
    try:
        return Ray.parse(text).check(tree)
    except ValueError as exc:
        raise click.BadParameter(str(exc), param_hint="--ray") from None


def _elements(G, words: str):
    labels = [w.strip() for w in words.split(",") if w.strip()]
    try:
        return [G.element(w) for w in labels], labels
    except (KeyError, ValueError) as exc:
        raise click.BadParameter(f"bad word: {exc}") from None


def _oracle(G, text):
    try:
        return parse_oracle(text, G)
    except (ScenarioError, ValueError, KeyError) as exc:
        raise click.BadParameter(str(exc), param_hint="--oracle") from None


group_opt = click.option("--group", "group_name", default="grigorchuk", show_default=True, help="Built-in name or JSON path.")
out_opt = click.option("--out", type=click.Path(dir_okay=False), default=None, help="Write output here instead of stdout.")
fmt_opt = click.option("--format", "fmt", type=click.Choice(["dot", "json"]), default="dot", show_default=True)
ray_opt = click.option("--ray", default="(1)", show_default=True, help="Ray such as 1^inf, (1), 0(10).")


class _Group(click.Group):
    """Usage and runtime errors exit with 1 so that 2 always means a refutation."""

    def main(self, *args, **kwargs):
        kwargs["standalone_mode"] = False
        try:
            rv = super().main(*args, **kwargs)
        except click.ClickException as exc:
            exc.show()
            sys.exit(1)
        except click.Abort:
            click.echo("Aborted!", err=True)
            sys.exit(1)
        sys.exit(rv if isinstance(rv, int) else 0)


@click.group(cls=_Group)
def main():
    """Tree automorphism groups: Schreier graphs, confinement and fingerprints."""


@main.group("group")
def group_cmd():
    """Inspect registered groups."""


@group_cmd.command("list")
def group_list():
    for name in builtin_names():
        click.echo(name)


@group_cmd.command("check")
@group_opt
@click.option("--horizon", default=10, show_default=True, callback=_positive)
def group_check(group_name, horizon):
    """Print generator orders, boundedness and nucleus size."""
    entry = _group(group_name)
    G = entry.group
    report = {"group": G.name, "tree": G.tree.to_json(), "level_transitive": entry.level_transitive, "generators": {}}
    for label in sorted(G.generators):
        g = G.generators[label]
        report["generators"][label] = {"order": order(g), "bounded": str(bounded_check(g, horizon))}
    try:
        report["nucleus_size"] = len(nucleus(list(G.generators.values())))
    except RuntimeError as exc:
        report["nucleus_size"] = f"not found: {exc}"
    click.echo(to_json(report), nl=False)


@main.command()
@group_opt
@click.option("--level", required=True, type=int, callback=_nonneg)
@fmt_opt
@out_opt
def schreier(group_name, level, fmt, out):
    """Finite Schreier graph on a level of the tree."""
    G = _group(group_name).group
    try:
        graph = ga.level_schreier(G, level)
    except ga.LevelTooLarge as exc:
        raise click.UsageError(str(exc)) from None
    _emit(export(graph, "graph", fmt), out)


@main.command()
@group_opt
@ray_opt
@click.option("--radius", required=True, type=int, callback=_nonneg)
@fmt_opt
@out_opt
def orbital(group_name, ray, radius, fmt, out):
    """Ball in the orbital Schreier graph of a ray."""
    G = _group(group_name).group
    _emit(export(ga.orbital_ball(G, _ray(ray, G.tree), radius), "graph", fmt), out)


@main.command()
@group_opt
@ray_opt
@click.option("--radius", required=True, type=int, callback=_nonneg)
@fmt_opt
@out_opt
def germ(group_name, ray, radius, fmt, out):
    """Ball in the graph of germs, with a covering check on stderr."""
    G = _group(group_name).group
    x = _ray(ray, G.tree)
    gb = ga.germ_ball(G, x, radius)
    problems = ga.verify_covering(gb)
    click.echo(f"germ ball {len(gb.graph)} over orbital {len(gb.orbital)}; {ga.fiber_profile(G, x, radius)}", err=True)
    for p in problems:
        click.echo(f"covering problem: {p}", err=True)
    _emit(export(gb.graph, "graph", fmt), out)


@main.command()
@group_opt
@click.option("--radius", required=True, type=int, callback=_nonneg)
@fmt_opt
@out_opt
def cayley(group_name, radius, fmt, out):
    """Ball in the Cayley graph."""
    G = _group(group_name).group
    _emit(export(ga.cayley_ball(G, radius), "graph", fmt), out)


@main.command()
@group_opt
@click.option("--word", required=True)
@click.option("--depth", default=4, show_default=True, type=int, callback=_nonneg)
@out_opt
def portrait(group_name, word, depth, out):
    """Portrait of an element as DOT."""
    from .automorphisms import portrait as portrait_of

    G = _group(group_name).group
    _emit(portrait_to_dot(portrait_of(G.element(word), depth), name=word), out)


@main.command()
@group_opt
@ray_opt
@click.option("--radius", required=True, type=int, callback=_positive, help="Orbital ball radius.")
@click.option("--up-to", type=int, default=None, callback=_positive, help="Largest ball radius in the table.")
@click.option("--embed", type=int, default=None, callback=_positive, help="Also test Cayley ball embedding at this radius.")
@out_opt
def growth(group_name, ray, radius, up_to, embed, out):
    """Growth table (CSV) over admissible centres, with the degree fit on stderr."""
    G = _group(group_name).group
    graph = ga.orbital_ball(G, _ray(ray, G.tree), radius)
    try:
        table = ga.graph_growth(graph, up_to or max(1, radius // 2))
    except ga.NoAdmissibleCenter as exc:
        raise click.UsageError(str(exc)) from None
    try:
        fit = ga.fit_growth_degree(table)
        click.echo(f"degree {fit['degree']} residual {fit['residual']:.4f} slope {fit['slope']:.3f} window {fit['window']}", err=True)
    except ga.EvidenceInsufficient as exc:
        click.echo(f"inconclusive: {exc}", err=True)
    if embed:
        click.echo(str(ga.ball_embedding_test(G, graph, embed)), err=True)
    _emit(table.to_csv(), out)


@main.command()
@group_opt
@ray_opt
@click.option("--radius", default=127, show_default=True, type=int, callback=_positive)
@click.option("--grid", type=int, default=None, callback=_positive, help="Use a grid of this width instead.")
@click.option("--bound", default=3, show_default=True, type=int, callback=_positive)
@click.option("--min-chain", default=20, show_default=True, type=int, callback=_positive)
def cutset(group_name, ray, radius, grid, bound, min_chain):
    """Search for a long chain of sets with small boundary."""
    if grid:
        graph = ga.grid_graph(grid, grid)
    else:
        G = _group(group_name).group
        graph = ga.orbital_ball(G, _ray(ray, G.tree), radius)
    cert = ga.cut_set_sequence(graph, bound, min_chain)
    if cert is None:
        click.echo(f"not_found(B={bound}, min_chain={min_chain})")
    else:
        click.echo(f"certificate(chain={len(cert)}, max_boundary={max(cert.boundaries)}, B={bound}); leud <= 1")


@main.group()
def confine():
    """Confining-set checks."""


def _confine_opts(f):
    f = click.option("--ball", "L", required=True, type=int, callback=_nonneg, help="Ball radius L.")(f)
    f = click.option("--oracle", default="point:(1)", show_default=True)(f)
    f = click.option("--P", "P_words", default="b,c,d", show_default=True, help="Comma-separated words.")(f)
    f = click.option("--expect", type=click.Choice(["confirmed"]), default=None)(f)
    return group_opt(f)


@confine.command("check")
@_confine_opts
def confine_check(group_name, P_words, oracle, L, expect):
    G = _group(group_name).group
    P, _ = _elements(G, P_words)
    H = _oracle(G, oracle)
    try:
        v = cf.check_confining(P, H, G, L)
    except cf.OracleScopeExceeded as exc:
        raise click.ClickException(str(exc)) from None
    click.echo(str(v))
    if expect and not v.confirmed:
        sys.exit(EXIT_REFUTED)


@confine.command("refine")
@_confine_opts
def confine_refine(group_name, P_words, oracle, L, expect):
    G = _group(group_name).group
    P, labels = _elements(G, P_words)
    H = _oracle(G, oracle)
    r = cf.refine_confining(P, H, G, L, labels)
    for lab in r.labels:
        click.echo(lab)
    click.echo(str(r.verdict))
    if expect and not r.ok:
        sys.exit(EXIT_REFUTED)


@confine.command("run")
@click.option("--scenario", "scenario_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_dir", type=click.Path(file_okay=False), default=None)
@click.pass_context
def confine_run(ctx, scenario_path, out_dir):
    """Run a confine or engine scenario file."""
    ctx.invoke(run, scenario_path=scenario_path, out_dir=out_dir)


@main.group()
def displace():
    """Build or verify displacement configurations."""


@displace.command("build")
@group_opt
@click.option("--P", "P_words", required=True)
@click.option("--depth", default=8, show_default=True, type=int, callback=_positive)
@out_opt
def displace_build(group_name, P_words, depth, out):
    G = _group(group_name).group
    P, labels = _elements(G, P_words)
    try:
        cfg = cf.build_displacement(P, depth, labels)
    except cf.OrderTwoObstruction as exc:
        raise click.ClickException(f"order_two_obstruction: {exc}") from None
    except cf.DepthBudgetExceeded as exc:
        raise click.ClickException(f"depth_budget_exceeded: {exc}") from None
    rep = cf.verify_displacement(cfg)
    click.echo(str(rep), err=True)
    _emit(to_json(cfg.to_json()), out)


@displace.command("verify")
@group_opt
@click.option("--config", "config_path", required=True, type=click.Path(exists=True, dir_okay=False))
def displace_verify(group_name, config_path):
    """Verify a configuration file written by ``displace build``."""
    import json

    G = _group(group_name).group
    data = json.loads(Path(config_path).read_text())
    P = [TreeAutomorphism.from_json(G.tree, d["automaton"]) for d in data["P"]]
    labels = [d["label"] for d in data["P"]]
    omega = tuple(Antichain.of(parse_vertex(v) for v in part) for part in data["omega"])
    rep = cf.verify_displacement(cf.DisplacementConfig(tuple(P), omega, tuple(labels)))
    click.echo(str(rep))
    if not rep.ok:
        sys.exit(EXIT_REFUTED)


@main.group()
def engine():
    """Commutator engine."""


@engine.command("run")
@_confine_opts
@click.option("--depth", default=8, show_default=True, type=int, callback=_positive)
@click.option("--no-refine", is_flag=True)
@out_opt
def engine_run(group_name, P_words, oracle, L, expect, depth, no_refine, out):
    params = {"oracle": oracle, "P": P_words.split(","), "refine": not no_refine}
    s = Scenario(group_name, "engine", params, {"L": L, "depth": depth}, {}, expect)
    outcome = _run(s)
    click.echo(outcome.report["verdict"], err=True)
    _emit(to_json(outcome.report), out)
    if outcome.refuted:
        sys.exit(EXIT_REFUTED)


@main.group()
def urs():
    """Closed-set and subgroup fingerprints."""


@urs.command("fingerprint")
@group_opt
@click.option("--oracle", default="point:(1)", show_default=True)
@click.option("--level", "n", required=True, type=int, callback=_nonneg)
@click.option("--ball", "L", default=4, show_default=True, type=int, callback=_nonneg)
def urs_fingerprint(group_name, oracle, n, L):
    G = _group(group_name).group
    H = _oracle(G, oracle)
    click.echo(ul.FINGERPRINT_CSV_HEADER + ",kind")
    for kind, fp in (
        ("rist_containment", ul.rist_containment_fingerprint(G, H, n, L)),
        ("fix_level", ul.fix_level(G, H, n, L)),
    ):
        click.echo(f"{fp.csv_line(G.tree)},{kind}")


@urs.command("orbit")
@group_opt
@click.option("--level", "n", required=True, type=int, callback=_nonneg)
@click.argument("S1")
@click.argument("S2")
def urs_orbit(group_name, n, s1, s2):
    """Are two comma-separated level-n vertex sets in the same orbit?"""
    G = _group(group_name).group

    def fp(text):
        try:
            return ul.Fingerprint.of(n, [parse_vertex(v) for v in text.split(",") if v])
        except ValueError as exc:
            raise click.BadParameter(str(exc)) from None

    click.echo("same_orbit" if ul.subset_orbit_equal(G, fp(s1), fp(s2)) else "different_orbits")


@urs.command("sandwich")
@group_opt
@click.option("--oracle", default="point:(1)", show_default=True)
@click.option("--level", "n", required=True, type=int, callback=_nonneg)
@click.option("--ball", "L", default=4, show_default=True, type=int, callback=_nonneg)
def urs_sandwich(group_name, oracle, n, L):
    G = _group(group_name).group
    ledger = ul.sandwich_check(G, _oracle(G, oracle), n, L)
    click.echo(str(ledger))
    if not ledger.ok:
        sys.exit(EXIT_REFUTED)


@main.group()
def bratteli():
    """Singularity profiles."""


@bratteli.command("profile")
@group_opt
@click.option("--word", default=None, help="Profile a group element.")
@click.option("--diagram", "diagram_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--rules", "rules_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--horizon", default=10, show_default=True, type=int, callback=_nonneg)
@out_opt
def bratteli_profile(group_name, word, diagram_path, rules_path, horizon, out):
    """Per-vertex counts of paths where the map is not a prefix replacement (CSV)."""
    import json

    if diagram_path:
        if not rules_path:
            raise click.UsageError("--diagram needs --rules")
        try:
            D = br.load_diagram(diagram_path)
            rules = json.loads(Path(rules_path).read_text())
            h = br.BoundedTypeHomeo(D, tuple((tuple(g), tuple(e)) for g, e in rules))
        except br.DiagramError as exc:
            raise click.ClickException(str(exc)) from None
        prof = br.singularity_profile(h, horizon)
    else:
        G = _group(group_name).group
        prof = br.singularity_profile(G.element(word or "a"), horizon)
        if prof.singular_rays is not None:
            click.echo("singular rays: " + " ".join(map(str, prof.singular_rays)), err=True)
    click.echo(prof.verdict, err=True)
    _emit(prof.to_csv(), out)


def _run(s: Scenario):
    try:
        return run_scenario(s)
    except ScenarioError as exc:
        raise click.UsageError(str(exc)) from None


@main.command()
@click.option("--scenario", "scenario_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_dir", type=click.Path(file_okay=False), default=None, help="Overrides outputs.dir.")
def run(scenario_path, out_dir):
    """Run a scenario file and write report.json plus artifacts."""
    try:
        s = Scenario.load(scenario_path)
    except ScenarioError as exc:
        raise click.UsageError(str(exc)) from None
    outcome = _run(s)
    directory = out_dir or s.outputs.get("dir")
    if directory:
        for p in outcome.write(directory):
            click.echo(f"wrote {p}", err=True)
    else:
        click.echo(to_json(outcome.report), nl=False)
    click.echo(outcome.report["verdict"], err=True)
    if outcome.refuted:
        sys.exit(EXIT_REFUTED)


if __name__ == "__main__":
    main()
