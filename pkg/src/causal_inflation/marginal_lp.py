"""Marginal description matrix, LP feasibility and Farkas certificates."""
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product as iproduct

import numpy as np

from .errors import ContractError
from .exact import format_rational, integer_normalize, rref, solve_exact, to_fraction
from .graph import fmt_set, sorted_nodes
from .simplex import phase1

FLOAT_TOL = 1e-9


@dataclass
class MarginalProblem:
    joint_vars: tuple
    cards: tuple
    contexts: list
    M: np.ndarray
    b: list
    extra_equalities: list = field(default_factory=list)
    row_labels: list = field(default_factory=list)
    descriptors: list = field(default_factory=list)
    inflation: object = None

    @property
    def shape(self):
        return self.M.shape

    @property
    def exact(self):
        return all(isinstance(x, Fraction) for x in self.b)

    def columns(self):
        """Global valuations, one per column, lexicographic in joint_vars order."""
        return list(iproduct(*[range(c) for c in self.cards]))

    def constraint_rows(self):
        """M stacked with the extra equality rows, and the matching right-hand side."""
        rows = [[int(v) for v in r] for r in self.M]
        rhs = list(self.b)
        for e in self.extra_equalities:
            rows.append(list(e))
            rhs.append(Fraction(0) if self.exact else 0.0)
        return rows, rhs


def description_matrix(joint_vars, cards, contexts):
    """0/1 matrix: row (context, valuation o), column global valuation v; 1 iff v restricts to o."""
    pos = {v: i for i, v in enumerate(joint_vars)}
    cols = list(iproduct(*[range(c) for c in cards]))
    blocks, labels = [], []
    for ctx in contexts:
        idx = [pos[v] for v in ctx]
        ccards = [cards[i] for i in idx]
        vals = list(iproduct(*[range(c) for c in ccards]))
        lookup = {o: r for r, o in enumerate(vals)}
        block = np.zeros((len(vals), len(cols)), dtype=np.int8)
        for j, g in enumerate(cols):
            block[lookup[tuple(g[i] for i in idx)], j] = 1
        blocks.append(block)
        labels.extend((tuple(ctx), o) for o in vals)
    return np.vstack(blocks), labels


def build_problem(inf, family, use_copy_isomorphism_equalities=False):
    contexts = [sorted_nodes(c) for c in family.contexts]
    joint = sorted_nodes(set().union(*map(set, contexts)))
    card = inf.inflated.cardinality
    cards = tuple(card[v] for v in joint)
    M, labels = description_matrix(joint, cards, contexts)
    b = []
    for ctx, t in zip(contexts, family.tables):
        b.extend(t.reorder(ctx).flat())
    if family.exact:
        b = [to_fraction(x) for x in b]
    else:
        b = [float(x) for x in b]
    extra = []
    if use_copy_isomorphism_equalities:
        extra = isomorphism_rows(inf, joint, cards, contexts)
    return MarginalProblem(joint, cards, contexts, M, b, extra, labels, list(family.descriptors), inf)


def isomorphism_rows(inf, joint, cards, contexts, sets=None):
    """Rows P_V1(o) - P_V2(phi(o)) over global valuations, one per (isomorphism, valuation), for
    pairs of context subsets. Duplicate and zero rows are dropped."""
    from .inflation import copy_isomorphism_equalities

    if sets is None:
        sets = set()
        for ctx in contexts:
            for r in range(1, len(ctx) + 1):
                for mask in iproduct([0, 1], repeat=len(ctx)):
                    if sum(mask) == r:
                        sets.add(frozenset(v for v, m in zip(ctx, mask) if m))
        sets = sorted(sets, key=lambda s: (len(s), sorted_nodes(s)))
    pos = {v: i for i, v in enumerate(joint)}
    cols = list(iproduct(*[range(c) for c in cards]))
    rows, seen = [], set()
    for iso in copy_isomorphism_equalities(inf, sets):
        src = sorted_nodes(iso.source)
        nm = iso.as_dict()
        tgt = tuple(nm[v] for v in src)
        if src == tgt:
            continue
        for o in iproduct(*[range(cards[pos[v]]) for v in src]):
            row = [0] * len(cols)
            for j, g in enumerate(cols):
                if all(g[pos[v]] == x for v, x in zip(src, o)):
                    row[j] += 1
                if all(g[pos[w]] == x for w, x in zip(tgt, o)):
                    row[j] -= 1
            key = tuple(row)
            if any(row) and key not in seen and tuple(-x for x in row) not in seen:
                seen.add(key)
                rows.append(row)
    return rows


@dataclass
class FeasibilityVerdict:
    status: str  # "feasible" | "infeasible"
    witness: list = None  # joint distribution over the columns when feasible
    certificate: list = None  # integer y over the constraint rows when infeasible
    engine: str = ""

    @property
    def feasible(self):
        return self.status == "feasible"

    def to_json(self):
        out = {"status": self.status}
        if self.certificate is not None:
            out["certificate"] = [format_rational(y) if isinstance(y, Fraction) else y for y in self.certificate]
        return out


def verify_certificate(p, y, tol=None):
    rows, rhs = p.constraint_rows()
    if tol is None:
        yM = [sum(yi * r[j] for yi, r in zip(y, rows) if yi != 0 and r[j] != 0) for j in range(len(rows[0]))]
        yb = sum(yi * bi for yi, bi in zip(y, rhs))
        return all(v >= 0 for v in yM) and yb < 0
    A = np.array(rows, dtype=float)
    yy = np.array([float(v) for v in y])
    return bool((yy @ A >= -tol).all() and yy @ np.array([float(v) for v in rhs]) < -tol)


def verify_witness(p, x, tol=None):
    rows, rhs = p.constraint_rows()
    if tol is None:
        if any(v < 0 for v in x):
            return False
        return all(sum(c * xv for c, xv in zip(r, x) if c) == bi for r, bi in zip(rows, rhs))
    A = np.array(rows, dtype=float)
    xx = np.array([float(v) for v in x])
    return bool((xx >= -tol).all() and np.abs(A @ xx - np.array([float(v) for v in rhs])).max() <= tol)


def _highs_feasibility(A, rhs):
    from scipy.optimize import linprog

    n = A.shape[1]
    res = linprog(np.zeros(n), A_eq=A, b_eq=rhs, bounds=(0, None), method="highs-ds")
    return res


def _highs_farkas(A, rhs):
    """min b.y subject to A^T y >= 0, -1 <= y <= 1; negative optimum means infeasible."""
    from scipy.optimize import linprog

    return linprog(rhs, A_ub=-A.T, b_ub=np.zeros(A.shape[1]), bounds=(-1, 1), method="highs-ds")


def _exact_from_support(rows, rhs, x):
    supp = [j for j, v in enumerate(x) if v > 1e-12]
    if not supp:
        return None
    sub = [[r[j] for j in supp] for r in rows]
    sol = solve_exact(sub, rhs)
    if sol is None or any(v < 0 for v in sol):
        return None
    full = [Fraction(0)] * len(x)
    for j, v in zip(supp, sol):
        full[j] = v
    return full


def _exact_farkas_from_float(rows, rhs, y):
    """Pin the float vertex's active constraints and solve for y exactly."""
    m, n = len(rows), len(rows[0])
    fixed = {}
    for i, v in enumerate(y):
        if abs(abs(v) - 1) < 1e-9:
            fixed[i] = Fraction(1 if v > 0 else -1)
    yA = np.array(y) @ np.array(rows, dtype=float)
    tight = [j for j in range(n) if abs(yA[j]) < 1e-9]
    free = [i for i in range(m) if i not in fixed]
    eqs, eq_rhs = [], []
    for j in tight:
        eqs.append([Fraction(rows[i][j]) for i in free])
        eq_rhs.append(-sum(fixed[i] * rows[i][j] for i in fixed))
    candidates = []
    if free:
        sol = solve_exact(eqs, eq_rhs) if eqs else [Fraction(0)] * len(free)
        if sol is not None:
            red, piv = rref([e + [r] for e, r in zip(eqs, eq_rhs)], len(free) + 1) if eqs else ([], [])
            if len(piv) == len(free):
                candidates.append(sol)
    else:
        candidates.append([])
    candidates.append([Fraction(y[i]).limit_denominator(10 ** 6) for i in free])
    for sol in candidates:
        full = [Fraction(0)] * m
        for i, v in fixed.items():
            full[i] = v
        for i, v in zip(free, sol):
            full[i] = v
        yield full


def normalize_certificate(y):
    return [Fraction(v) for v in integer_normalize(y)]


def solve(p, mode="exact", engine="auto"):
    """Decide whether Mv = b (plus extra equalities) has a solution v >= 0.

    mode="exact": verdicts and certificates are verified in rational arithmetic; HiGHS is used as
    an accelerator whose output is re-derived exactly, with the exact simplex as fallback.
    mode="float": HiGHS only, residuals checked to 1e-9."""
    rows, rhs = p.constraint_rows()
    if mode == "float":
        A = np.array(rows, dtype=float)
        bb = np.array([float(v) for v in rhs])
        res = _highs_feasibility(A, bb)
        if res.status == 0 and verify_witness(p, list(res.x), FLOAT_TOL):
            return FeasibilityVerdict("feasible", witness=list(res.x), engine="highs")
        far = _highs_farkas(A, bb)
        if far.status == 0 and far.fun < -FLOAT_TOL:
            return FeasibilityVerdict("infeasible", certificate=list(far.x), engine="highs")
        return FeasibilityVerdict("feasible", witness=list(res.x) if res.x is not None else None, engine="highs")
    if mode != "exact":
        raise ContractError(f"unknown arithmetic mode {mode!r}")
    rhs = [to_fraction(v) for v in rhs]
    if engine in ("auto", "highs"):
        A = np.array(rows, dtype=float)
        bb = np.array([float(v) for v in rhs])
        res = _highs_feasibility(A, bb)
        if res.status == 0:
            x = _exact_from_support(rows, rhs, res.x)
            if x is not None and verify_witness(p, x):
                return FeasibilityVerdict("feasible", witness=x, engine="highs+exact")
        else:
            far = _highs_farkas(A, bb)
            if far.status == 0 and far.fun < -1e-12:
                for y in _exact_farkas_from_float(rows, rhs, list(far.x)):
                    if verify_certificate(p, y):
                        return FeasibilityVerdict("infeasible", certificate=normalize_certificate(y),
                                                  engine="highs+exact")
        if engine == "highs":
            raise ContractError("accelerated solve could not produce an exact verdict")
    r = phase1(rows, rhs)
    if r.feasible:
        if not verify_witness(p, r.x):
            raise AssertionError("simplex returned a point that does not satisfy the constraints")
        return FeasibilityVerdict("feasible", witness=r.x, engine="simplex")
    y = normalize_certificate(r.y)
    if not verify_certificate(p, y):
        raise AssertionError("simplex returned an invalid Farkas certificate")
    return FeasibilityVerdict("infeasible", certificate=y, engine="simplex")


def certificate_expression(p, y):
    """sum_r y_r P_{ctx_r}(o_r) as an inflated-level Polynomial (extra equality rows drop out)."""
    from .inequalities import Atom, Polynomial

    if not any(y):
        raise ContractError("a zero vector is not a certificate")
    expr = Polynomial()
    for (ctx, o), yi in zip(p.row_labels, y):
        if yi != 0:
            expr = expr + Polynomial.atom(Atom.prob(ctx, o), 1, yi)
    return expr


def certificate_to_inequality(p, y, recipes=None):
    """Causal compatibility inequality on the original structure from a verified certificate."""
    from .inequalities import PolynomialInequality, to_original

    if not verify_certificate(p, [to_fraction(v) for v in y]):
        raise ContractError("certificate does not verify: need y^T M >= 0 and y^T b < 0")
    if recipes is None:
        recipes = _recipes_from_descriptors(p)
    return to_original(PolynomialInequality(certificate_expression(p, y), "certificate"), p.inflation, recipes)


def _recipes_from_descriptors(p):
    from .inflation import ExpressibleSet

    out = {}
    for d in p.descriptors:
        if isinstance(d, ExpressibleSet) and d.found:
            out[frozenset(d.members)] = d.recipe
    return out


def noisy_ghz(alpha, variables=("A", "B", "C"), exact=True):
    """alpha on the two constant outcomes, remaining weight spread evenly over the other six."""
    from .distributions import JointTable

    a = to_fraction(alpha) if exact else float(alpha)
    entries = {}
    for v in iproduct([0, 1], repeat=3):
        entries[v] = a / 2 if len(set(v)) == 1 else (1 - a) / 6
    return JointTable.from_dict(variables, [2, 2, 2], entries, exact=exact)


def describe(p):
    return f"{p.M.shape[0]}x{p.M.shape[1]} over {fmt_set(p.joint_vars)}"
