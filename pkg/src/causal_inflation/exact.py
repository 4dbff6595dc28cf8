"""Small exact-arithmetic helpers: rational parsing/formatting and linear algebra over Q."""
from fractions import Fraction
from math import gcd, lcm
from functools import reduce


def to_fraction(x):
    """Parse ints, Fractions, floats (exactly) and strings like "1/3" or "0.25"."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not probabilities")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    # numpy scalars
    if hasattr(x, "item"):
        return to_fraction(x.item())
    raise TypeError(f"cannot interpret {x!r} as a rational number")


def format_rational(q):
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def integer_normalize(vec):
    """Scale a rational vector by a positive factor to coprime integers."""
    vec = [Fraction(v) for v in vec]
    den = reduce(lcm, (v.denominator for v in vec), 1)
    ints = [int(v * den) for v in vec]
    g = reduce(gcd, (abs(i) for i in ints), 0)
    if g == 0:
        return ints
    return [i // g for i in ints]


def rref(rows, ncols=None):
    """Reduced row echelon form over Q. Returns (rows, pivot_columns)."""
    mat = [[Fraction(v) for v in row] for row in rows]
    if not mat:
        return [], []
    ncols = len(mat[0]) if ncols is None else ncols
    pivots = []
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, len(mat)) if mat[i][c] != 0), None)
        if pr is None:
            continue
        mat[r], mat[pr] = mat[pr], mat[r]
        pv = mat[r][c]
        if pv != 1:
            mat[r] = [v / pv for v in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c] != 0:
                f = mat[i][c]
                ri = mat[r]
                mat[i] = [a - f * b for a, b in zip(mat[i], ri)]
        pivots.append(c)
        r += 1
        if r == len(mat):
            break
    return mat[:r], pivots


def rank(rows):
    return len(rref(rows)[1])


def nullspace(rows, ncols):
    """Basis of {x : rows @ x = 0} over Q."""
    red, piv = rref(rows, ncols) if rows else ([], [])
    free = [c for c in range(ncols) if c not in piv]
    basis = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for row, p in zip(red, piv):
            x[p] = -row[f]
        basis.append(x)
    return basis


def solve_exact(rows, rhs):
    """One solution of rows @ x = rhs over Q, or None if inconsistent."""
    ncols = len(rows[0]) if rows else 0
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    red, piv = rref(aug, ncols + 1)
    if ncols in piv:
        return None
    x = [Fraction(0)] * ncols
    for row, p in zip(red, piv):
        x[p] = row[ncols]
    return x


def rank_mod_p(matrix, p=2147483629):
    """Rank over GF(p) of an integer matrix; a lower bound on the rational rank."""
    import numpy as np

    a = np.array(matrix, dtype=np.int64) % p
    nrows, ncols = a.shape
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        nz = np.nonzero(a[r:, c])[0]
        if nz.size == 0:
            continue
        pr = r + nz[0]
        if pr != r:
            a[[r, pr]] = a[[pr, r]]
        inv = pow(int(a[r, c]), p - 2, p)
        a[r] = (a[r] * inv) % p
        others = np.nonzero(a[:, c])[0]
        others = others[others != r]
        if others.size:
            f = a[others, c][:, None]
            # p < 2**31 keeps f * a[r] below 2**62
            a[others] = (a[others] - f * a[r][None, :]) % p
        r += 1
    return r
