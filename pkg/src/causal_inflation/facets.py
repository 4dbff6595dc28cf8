"""Facets of marginal polytopes by Fourier-Motzkin elimination.

The polytope is {M x : x >= 0, sum x = 1}. We keep a maximal independent set of rows of M
(the other rows are fixed linear combinations of these, i.e. the affine hull), solve for a
basis of the x variables and eliminate the rest. Rows carry a bitset of the original
nonnegativity constraints they combine; Chernikov's rule and a subset test discard
redundant combinations, and the survivors are checked to be facets exactly."""
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import lcm
from functools import reduce

import numpy as np

from .errors import CapacityError, ContractError
from .exact import integer_normalize, nullspace, rank_mod_p, rref

DEFAULT_CAP = 500_000
_INT_LIMIT = 2 ** 30


@dataclass
class Polytope:
    """vertices: columns of M; facets: (normal over all M rows, offset) meaning normal . b >= offset.

    affine_hull rows are (coefficients over M rows, constant) with coefficients . b = constant."""
    vertices: list
    affine_hull: list
    facets: list
    basis_rows: list = field(default_factory=list)
    dimension: int = 0

    def is_valid(self):
        V = np.array(self.vertices, dtype=object).T  # rows of M x vertices
        for normal, off in self.facets:
            vals = np.array(normal, dtype=object) @ V
            if any(v < off for v in vals):
                return False
        for coeffs, const in self.affine_hull:
            vals = np.array(coeffs, dtype=object) @ V
            if any(v != const for v in vals):
                return False
        return True


def _select_rows(M):
    """Indices of a maximal linearly independent set of rows (first-come order)."""
    red, piv = rref(np.asarray(M).T.tolist())
    return piv


def _inverse(B):
    d = len(B)
    aug = [list(map(Fraction, row)) + [Fraction(int(i == j)) for j in range(d)] for i, row in enumerate(B)]
    red, piv = rref(aug, 2 * d)
    if piv[:d] != list(range(d)):
        raise ContractError("basis matrix is singular")
    return [row[d:] for row in red]


def _popcount(S):
    return np.bitwise_count(S).sum(axis=1)


def _bit(j, words):
    out = np.zeros(words, dtype=np.uint64)
    out[j // 64] = np.uint64(1) << np.uint64(j % 64)
    return out


def fourier_motzkin(V, cap=DEFAULT_CAP, log=None):
    """Project {V x : x >= 0} for a full-row-rank integer matrix V (d x n).

    Returns integer rows a (length d) with a . b >= 0 describing the cone."""
    V = np.asarray(V, dtype=np.int64)
    d, n = V.shape
    cols = rref(V.tolist(), n)[1]
    if len(cols) != d:
        raise ContractError("V must have full row rank")
    Binv = _inverse(V[:, cols].tolist())
    L = reduce(lcm, (x.denominator for row in Binv for x in row), 1)
    Bi = np.array([[int(x * L) for x in row] for row in Binv], dtype=np.int64)
    N = [j for j in range(n) if j not in set(cols)]
    VN = V[:, N]
    words = (n + 63) // 64
    # x_B = Binv b - Binv V_N x_N >= 0 and x_N >= 0, as rows [b coeffs | x_N coeffs]
    R, S = [], []
    for k in range(d):
        R.append(np.concatenate([Bi[k], -(Bi[k] @ VN)]))
        S.append(_bit(cols[k], words))
    for t, j in enumerate(N):
        r = np.zeros(d + len(N), dtype=np.int64)
        r[d + t] = 1
        R.append(r)
        S.append(_bit(j, words))
    R = np.array(R)
    S = np.array(S, dtype=np.uint64)
    remaining = list(range(d, d + len(N)))
    step = 0
    while remaining:
        # eliminate the variable with the fewest nonzero coefficients
        k = min(remaining, key=lambda c: (int(np.count_nonzero(R[:, c])), c))
        remaining.remove(k)
        col = R[:, k]
        P = np.where(col > 0)[0]
        Ng = np.where(col < 0)[0]
        Z = np.where(col == 0)[0]
        step += 1
        pi = np.repeat(P, len(Ng))
        ni = np.tile(Ng, len(P))
        U = S[pi] | S[ni]
        keep = _popcount(U) <= step + 1  # Chernikov
        U, pi, ni = U[keep], pi[keep], ni[keep]
        ok = np.ones(len(U), dtype=bool)
        chunk = max(1, 20_000_000 // max(1, S.size))
        for s in range(0, len(U), chunk):
            u = U[s:s + chunk]
            inside = ((S[None, :, :] & ~u[:, None, :]) == 0).all(axis=2).sum(axis=1)
            ok[s:s + chunk] = inside <= 2  # only the two parents may be covered by the union
        U, pi, ni = U[ok], pi[ok], ni[ok]
        a = R[pi]
        b = R[ni]
        if R.dtype != object and len(R) and int(np.abs(R).max()) ** 2 * 2 > 2 ** 62:
            R = R.astype(object)
            a, b = a.astype(object), b.astype(object)
        newR = a * (-col[ni])[:, None] + b * col[pi][:, None]
        if newR.size:
            g = np.gcd.reduce(np.abs(newR).astype(np.int64) if newR.dtype != object else np.abs(newR), axis=1)
            g = np.where(g == 0, 1, g)
            newR = newR // g[:, None]
        R = np.concatenate([R[Z], newR]) if len(newR) else R[Z]
        S = np.concatenate([S[Z], U]) if len(U) else S[Z]
        if log:
            log(f"step {step}: eliminated column {k} ({len(P)}+/{len(Ng)}-/{len(Z)}0) -> {len(R)} rows")
        if len(R) > cap:
            raise CapacityError(f"intermediate system has {len(R)} rows, above the cap of {cap}")
    out, seen = [], set()
    for row in R[:, :d]:
        t = tuple(integer_normalize([int(x) for x in row]))
        if any(t) and t not in seen:
            seen.add(t)
            out.append(t)
    return out


def _exact_rank(cols_matrix):
    return len(rref(cols_matrix)[1]) if len(cols_matrix) else 0


def is_facet(a, V):
    """a . v >= 0 on every column v of V, with equality on a set spanning a hyperplane."""
    vals = np.asarray(a, dtype=object) @ np.asarray(V, dtype=object)
    if any(x < 0 for x in vals):
        return False
    tight = [j for j, x in enumerate(vals) if x == 0]
    d = len(a)
    if not tight:
        return d == 1
    sub = np.asarray(V, dtype=np.int64)[:, tight].T
    r = rank_mod_p(sub)
    if r < d - 1:
        r = _exact_rank(sub.tolist())
    return r == d - 1


def affine_hull(M):
    """Equations satisfied by every column of M: left-nullspace rows (= 0) plus normalization."""
    M = np.asarray(M, dtype=np.int64)
    m, n = M.shape
    eqs = [(integer_normalize(y), 0) for y in nullspace(M.T.tolist(), m)]
    # any row combination constant on all columns: solve y M = 1
    from .exact import solve_exact
    y = solve_exact(M.T.tolist(), [1] * n)
    if y is not None:
        eqs.append(([Fraction(v) for v in y], 1))
    return eqs


def enumerate_facets(problem, cap=DEFAULT_CAP, log=None, verify=True):
    """Facets of the marginal polytope of a MarginalProblem (extra equalities are ignored)."""
    M = np.asarray(problem.M if hasattr(problem, "M") else problem, dtype=np.int64)
    sel = _select_rows(M)
    V = M[sel]
    rows = fourier_motzkin(V, cap=cap, log=log)
    if verify:
        bad = [a for a in rows if not is_facet(a, V)]
        if bad:
            raise AssertionError(f"{len(bad)} eliminated rows are not facets")
    m = M.shape[0]
    facets = []
    for a in rows:
        full = [0] * m
        for i, x in zip(sel, a):
            full[i] = x
        facets.append((full, 0))
    facets.sort(key=lambda f: f[0])
    return Polytope(vertices=M.T.tolist(), affine_hull=affine_hull(M), facets=facets,
                    basis_rows=list(sel), dimension=len(sel) - 1)


def brute_force_facets(M):
    """Oracle for small instances: every hyperplane through d-1 independent vertices (in the
    selected-row coordinates) that leaves all vertices on one side."""
    M = np.asarray(M, dtype=np.int64)
    sel = _select_rows(M)
    V = M[sel]
    d, n = V.shape
    found = set()
    for combo in combinations(range(n), d - 1):
        sub = V[:, combo].T.tolist()
        ns = nullspace(sub, d)
        if len(ns) != 1:
            continue
        a = integer_normalize(ns[0])
        vals = np.array(a, dtype=object) @ V.astype(object)
        if all(x >= 0 for x in vals):
            found.add(tuple(a))
        elif all(x <= 0 for x in vals):
            found.add(tuple(-x for x in a))
    return sorted(found), sel


def facet_inequality(problem, normal):
    """Inflated-level inequality sum_r normal_r P_{ctx_r}(o_r) >= 0."""
    from .inequalities import Atom, Polynomial, PolynomialInequality

    expr = Polynomial()
    for (ctx, o), c in zip(problem.row_labels, normal):
        if c:
            expr = expr + Polynomial.atom(Atom.prob(ctx, o), 1, c)
    return PolynomialInequality(expr, "facet")


def facets_to_causal_inequalities(inf, problem, polytope, correlators=None):
    """Translate each facet to the original structure (block factorization, copy indices dropped).

    Binary problems come back in correlator form unless correlators=False."""
    from .inequalities import to_original

    if correlators is None:
        correlators = all(c == 2 for c in problem.cards)
    out = []
    for normal, _ in polytope.facets:
        q = to_original(facet_inequality(problem, normal), inf)
        if correlators:
            q = q.preferred_form()
        out.append(q)
    return out


def _marginal_atoms(problem, subset, values):
    """P_subset(values) as a sum of context atoms, using the first context containing the subset."""
    from .inequalities import Atom, Polynomial

    want = dict(zip(subset, values))
    for ctx in problem.contexts:
        if set(subset) <= set(ctx):
            expr = Polynomial()
            for c, o in problem.row_labels:
                if tuple(c) == tuple(ctx) and all(want[v] == x for v, x in zip(c, o) if v in want):
                    expr = expr + Polynomial.atom(Atom.prob(c, o))
            return expr
    return None


def linear_equalities(problem, isomorphisms=True):
    """Polynomials in context atoms that vanish for every inflation model: the affine hull of the
    marginal polytope, plus (optionally) copy-isomorphism equalities between marginals of subsets
    of the contexts."""
    from itertools import product as iproduct
    from .inequalities import Atom, Polynomial
    from .inflation import copy_isomorphism_equalities

    labels = [Atom.prob(c, o) for c, o in problem.row_labels]
    out = []
    for coeffs, const in affine_hull(problem.M):
        e = Polynomial.const(-const)
        for a, c in zip(labels, coeffs):
            if c:
                e = e + Polynomial.atom(a, 1, c)
        out.append(e)
    if not isomorphisms:
        return out
    subsets = {frozenset(s) for ctx in problem.contexts for r in range(1, len(ctx) + 1)
               for s in combinations(ctx, r)}
    card = dict(zip(problem.joint_vars, problem.cards))
    for iso in copy_isomorphism_equalities(problem.inflation, subsets):
        phi = dict(iso.node_map)
        src = list(iso.source)
        for vals in iproduct(*[range(card[v]) for v in src]):
            tgt = sorted(zip((phi[v] for v in src), vals))
            left = _marginal_atoms(problem, src, vals)
            right = _marginal_atoms(problem, [v for v, _ in tgt], [x for _, x in tgt])
            out.append(left - right)
    return out
