"""Four distributions that no classical model of their causal structure can produce.

Each one is pushed through an inflation: the marginals it forces on the inflated graph are fed to
an LP over all joint distributions of the inflated variables. An infeasible LP comes back with an
integer Farkas vector, which is itself a causal compatibility inequality.

    python demos/witness_incompatibility.py
"""
from causal_inflation import fixtures as fx
from causal_inflation.distributions import inflation_family
from causal_inflation.marginal_lp import build_problem, certificate_to_inequality, describe, solve

CASES = [
    # (original, inflation, distribution, context selection, extra expressible sets)
    ("triangle", "cut", "ghz", "maximal-ai", []),
    ("triangle", "spiral", "w", "maximal-ai", []),
    ("bell", "bell_inflation", "pr_box", "maximal-ai", []),
    ("hlp16", "russian_dolls", "pienaar", "maximal-ai", ["A1 C2 Y1 Y2"]),
]


def main():
    for original, inflated, dist_name, selection, extra in CASES:
        inf = fx.load_inflation(original, inflated)
        dist = fx.load_distribution(dist_name)
        contexts = fx.select_contexts(inf, selection, extra)
        p = build_problem(inf, inflation_family(inf, dist, contexts))
        verdict = solve(p)
        print(f"{dist_name} on {original} via {inflated}: LP {describe(p)} is {verdict.status}")
        if verdict.feasible:
            continue
        q = certificate_to_inequality(p, verdict.certificate)
        if all(c == 2 for c in p.cards):
            q = q.preferred_form()
        value, _ = q.evaluate(dist)
        text = q.render()
        if len(text) > 300:
            text = f"{len(q.expr.terms)} terms, with divisions" if q.has_divisions() else f"{len(q.expr.terms)} terms"
        print(f"  inequality  {text}")
        print(f"  {dist_name} gives {value}")
        print()


if __name__ == "__main__":
    main()
