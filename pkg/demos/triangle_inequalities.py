"""Deriving polynomial inequalities for the triangle in two ways.

First the cheap route: a Hardy-type implication on the Spiral inflation. Fixing A2=B2=C2=1, every
global valuation must make one of four context events true; the union bound turns that into an
inequality, and factorizing the ai-expressible contexts gives a statement about the triangle that
the W distribution violates.

Then the complete route: Fourier-Motzkin on the Spiral marginal polytope (about two minutes), whose
facets translate to inequalities grouped here into symmetry classes.

    python demos/triangle_inequalities.py [--skip-facets]
"""
import sys
import time

from causal_inflation import fixtures as fx
from causal_inflation.distributions import inflation_family
from causal_inflation.facets import enumerate_facets, facets_to_causal_inequalities
from causal_inflation.hardy import build_hypergraph, implications, implications_to_inequalities, restrict, vertex
from causal_inflation.inequalities import symmetry_classes, symmetry_group
from causal_inflation.inflation import ai_expressible_sets
from causal_inflation.marginal_lp import build_problem


def main():
    spiral = fx.load_inflation("triangle", "spiral")
    w = fx.load_distribution("w")
    p = build_problem(spiral, inflation_family(spiral, w, ai_expressible_sets(spiral)))

    h = build_hypergraph(p)
    ant = vertex("A2 B2 C2", "111")
    r = restrict(h, ant)
    print(f"hypergraph: {h.n_vertices} vertices, {h.n_edges} edges; "
          f"after fixing A2=B2=C2=1: {r.n_vertices} vertices, {r.n_edges} edges")
    imps = implications(h, ant)
    print(f"{len(imps)} minimal implications, for example")
    want = {vertex("A1 B2 C2", "111"), vertex("A2 B1 C2", "111"), vertex("A2 B2 C1", "111"), vertex("A1 B1 C1", "000")}
    imp = next(i for i in imps if set(i.consequent) == want)
    print("  " + imp.render())
    (q,) = implications_to_inequalities(spiral, [imp])
    print("  " + q.render())
    print(f"  W gives {q.evaluate(w)[0]}")

    if "--skip-facets" in sys.argv:
        return
    t = time.perf_counter()
    poly = enumerate_facets(p)
    print(f"\n{len(poly.facets)} facets of the Spiral marginal polytope (dimension {poly.dimension}), "
          f"{time.perf_counter() - t:.0f}s")
    grp = symmetry_group(spiral.original)
    classes = symmetry_classes(facets_to_causal_inequalities(spiral, p, poly), grp)
    print(f"{len(classes)} symmetry classes of translated inequalities")


if __name__ == "__main__":
    main()
