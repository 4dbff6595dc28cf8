"""How much GHZ-type correlation can the triangle tolerate?

A noisy GHZ distribution puts weight alpha on 000 and 111 together and spreads the rest over the
other six outcomes. The Cut inflation rules it out for every alpha above 5/8, and bisection on the
exact LP finds that edge. The larger Web inflation then refutes a value below it (float LP, 4096
columns, a few seconds).

    python demos/noisy_ghz_threshold.py [--skip-web]
"""
import sys
from fractions import Fraction

from causal_inflation import fixtures as fx
from causal_inflation.distributions import inflation_family
from causal_inflation.inflation import ai_expressible_sets
from causal_inflation.marginal_lp import build_problem, noisy_ghz, solve


def feasible(inf, contexts, alpha, mode="exact"):
    p = build_problem(inf, inflation_family(inf, noisy_ghz(alpha, exact=mode == "exact"), contexts))
    return solve(p, mode=mode).feasible


def main():
    cut = fx.load_inflation("triangle", "cut")
    contexts = ai_expressible_sets(cut)
    lo, hi = Fraction(1, 2), Fraction(1)
    for _ in range(12):
        mid = (lo + hi) / 2
        lo, hi = (mid, hi) if feasible(cut, contexts, mid) else (lo, mid)
    print(f"Cut inflation: feasible up to alpha in [{float(lo):.5f}, {float(hi):.5f}]")
    print(f"  at exactly 5/8: {'feasible' if feasible(cut, contexts, Fraction(5, 8)) else 'infeasible'}")

    if "--skip-web" in sys.argv:
        return
    web = fx.load_inflation("triangle", "web")
    wctx = ai_expressible_sets(web)
    for alpha in ("0.59", "0.61"):
        verdict = "feasible" if feasible(web, wctx, alpha, mode="float") else "infeasible"
        print(f"Web inflation at alpha={alpha}: {verdict}")


if __name__ == "__main__":
    main()
