"""Using conditional independences of the inflated graph, not just ancestral independence.

In the Russian dolls inflation of HLP structure 16, {A1 C2 Y1} is not injectable, but A1 and C2
are d-separated by {B1 Y1}, so its distribution is P_A1B1Y1 * P_B1C2Y1 / P_B1Y1 built from
injectable pieces. With such expressible sets as contexts, a Hardy implication gives an
inequality with a division in it, and a distribution that satisfies every conditional
independence of the structure still violates it.

    python demos/expressible_sets.py
"""
from causal_inflation import fixtures as fx
from causal_inflation.distributions import conditional_mutual_information, inflation_family
from causal_inflation.hardy import build_hypergraph, implications, implications_to_inequalities, vertex
from causal_inflation.marginal_lp import build_problem


def show(recipe, depth=1):
    label = " ".join(map(str, recipe.members))
    print("  " * depth + f"{recipe.op}: {label}")
    for child in recipe.children:
        show(child, depth + 1)


def main():
    dolls = fx.load_inflation("hlp16", "russian_dolls")
    pienaar = fx.load_distribution("pienaar")

    contexts = fx.select_contexts(dolls, "none", ["B2 C1 Y1 Y2", "B2 C2 Y1 Y2", "A1 C1 Y1 Y2", "A1 C2 Y1 Y2"])
    print("recipe for A1 C2 Y1 Y2:")
    show(contexts[-1].recipe)

    p = build_problem(dolls, inflation_family(dolls, pienaar, contexts))
    h = build_hypergraph(p)
    want = {vertex("B2 C2 Y1 Y2", "0110"), vertex("A1 C1 Y1 Y2", "1010"), vertex("A1 C2 Y1 Y2", "0010")}
    (imp,) = [i for i in implications(h, vertex("B2 C1 Y1 Y2", "0010")) if set(i.consequent) == want]
    print("\n" + imp.render())
    recipes = {frozenset(c.members): c.recipe for c in contexts}
    (q,) = implications_to_inequalities(dolls, [imp], recipes)
    print(q.render())

    for name in ("pienaar", "all_ci_respecting"):
        d = fx.load_distribution(name)
        print(f"{name}: value {q.evaluate(d)[0]}")
    t = fx.load_distribution("all_ci_respecting", exact=False)
    cmis = [conditional_mutual_information(t, *args) for args in ((["C"], ["Y"]), (["A"], ["B"], ["Y"]),
                                                                  (["A"], ["Y"], ["B"]))]
    print("all_ci_respecting: I(C:Y), I(A:B|Y), I(A:Y|B) = " + ", ".join(f"{v:.1e}" for v in cmis))


if __name__ == "__main__":
    main()
