"""Exact phase-1 simplex over the rationals (Bland's rule) for  A x = b, x >= 0.

Returns either a nonnegative solution or a Farkas vector y with y^T A >= 0 and y^T b < 0."""
from fractions import Fraction


class Phase1Result:
    def __init__(self, feasible, x=None, y=None, pivots=0):
        self.feasible = feasible
        self.x = x
        self.y = y
        self.pivots = pivots


def phase1(A, b, max_pivots=None):
    m = len(A)
    n = len(A[0]) if m else 0
    flip = [bi < 0 for bi in b]
    rows = []
    for i in range(m):
        s = -1 if flip[i] else 1
        row = [Fraction(s * a) for a in A[i]]
        art = [Fraction(0)] * m
        art[i] = Fraction(1)
        rows.append(row + art + [Fraction(s * b[i])])
    ncol = n + m
    basis = [n + i for i in range(m)]
    # reduced costs for min sum(artificials): c_j - c_B B^-1 A_j
    cost = [Fraction(0)] * n + [Fraction(1)] * m
    red = [Fraction(0)] * (ncol + 1)
    for j in range(ncol + 1):
        red[j] = (cost[j] if j < ncol else Fraction(0)) - sum(rows[i][j] for i in range(m))
    pivots = 0
    while True:
        enter = next((j for j in range(ncol) if red[j] < 0), None)
        if enter is None:
            break
        best = None
        for i in range(m):
            a = rows[i][enter]
            if a > 0:
                ratio = rows[i][ncol] / a
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:  # cannot happen in phase 1: the objective is bounded below by 0
            raise RuntimeError("phase-1 objective unbounded")
        r = best[1]
        piv = rows[r][enter]
        prow = [v / piv for v in rows[r]]
        rows[r] = prow
        nz = [(j, v) for j, v in enumerate(prow) if v != 0]
        for i in range(m):
            if i != r:
                f = rows[i][enter]
                if f != 0:
                    ri = rows[i]
                    for j, v in nz:
                        ri[j] -= f * v
        f = red[enter]
        for j, v in nz:
            red[j] -= f * v
        basis[r] = enter
        pivots += 1
        if max_pivots is not None and pivots > max_pivots:
            raise RuntimeError("pivot limit exceeded")
    objective = -red[ncol]
    if objective == 0:
        x = [Fraction(0)] * n
        for i, j in enumerate(basis):
            if j < n:
                x[j] = rows[i][ncol]
        return Phase1Result(True, x=x, pivots=pivots)
    # u_i = 1 - reduced cost of artificial i; y = -u, undoing row flips
    y = []
    for i in range(m):
        u = 1 - red[n + i]
        y.append(u if flip[i] else -u)
    return Phase1Result(False, y=y, pivots=pivots)
