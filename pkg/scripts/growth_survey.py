"""Orbital growth, germ fibers and boundedness for every registered group.

For each group and each constant ray: fitted growth degree of the orbital
ball, the germ fiber size, and whether the Cayley ball embeds.  Writes one
CSV row per (group, ray) to stdout.

Usage: python scripts/growth_survey.py [radius]
"""

import sys

from treeconf import group_actions as ga
from treeconf.automorphisms import bounded_check
from treeconf.registry import builtin_names, load_group
from treeconf.words_tree import Ray


def survey(radius: int):
    print("group,ray,orbital_size,degree,residual,slope,germ_fiber,covering,embedding_R4,generators_bounded")
    for name in builtin_names():
        G = load_group(name)
        bounded = all(bounded_check(g, 8).kind == "bounded_with" for g in G.generators.values())
        for x in range(G.tree.degree(0)):
            ray = Ray.constant(x)
            orbital = ga.orbital_ball(G, ray, radius)
            try:
                fit = ga.fit_growth_degree(ga.graph_growth(orbital, radius // 2))
                deg, res, slope = fit["degree"], f"{fit['residual']:.4f}", f"{fit['slope']:.3f}"
            except (ga.EvidenceInsufficient, ga.NoAdmissibleCenter):
                deg = res = slope = ""
            germ = ga.germ_ball(G, ray, 6)
            prof = ga.fiber_profile(G, ray, 6)
            embed = ga.ball_embedding_test(G, orbital, 4)
            print(
                f"{name},{ray},{len(orbital)},{deg},{res},{slope},{prof.base_fiber},"
                f"{not ga.verify_covering(germ)},{embed.embeds},{bounded}"
            )


if __name__ == "__main__":
    survey(int(sys.argv[1]) if len(sys.argv) > 1 else 32)
