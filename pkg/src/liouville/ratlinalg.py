"""Exact rational linear algebra and integer lattice utilities.

Matrices are lists of row tuples with Fraction entries; lattice routines work
on integer column vectors with arbitrary-precision ints.  Everything here is
small dense desk-scale math: correctness over asymptotics.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction


def _rows(mat):
    return [list(map(Fraction, r)) for r in mat]


def rref(mat):
    """Reduced row echelon form; returns (rows, pivot_columns)."""
    rows = _rows(mat)
    if not rows:
        return [], []
    ncols = len(rows[0])
    pivots = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        pv = rows[r][c]
        rows[r] = [x / pv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows, pivots


def rank(mat) -> int:
    return len(rref(mat)[1])


def solve(mat, rhs):
    """One exact solution x of mat @ x = rhs, or None if inconsistent.

    Free variables are set to 0.
    """
    rows = _rows(mat)
    if not rows:
        return [] if all(Fraction(b) == 0 for b in rhs) else None
    aug = [row + [Fraction(b)] for row, b in zip(rows, rhs)]
    red, pivots = rref(aug)
    ncols = len(rows[0])
    if ncols in pivots:
        return None  # pivot in the rhs column
    x = [Fraction(0)] * ncols
    for r, c in enumerate(pivots):
        x[c] = red[r][ncols]
    return x


def nullspace(mat):
    """Basis of the rational kernel {x : mat @ x = 0}."""
    rows = _rows(mat)
    if not rows:
        return []
    ncols = len(rows[0])
    red, pivots = rref(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for r, pc in enumerate(pivots):
            v[pc] = -red[r][fc]
        basis.append(v)
    return basis


def left_dependency(rows):
    """A nonzero rational vector lam with sum(lam_i * row_i) = 0, or None."""
    transposed = list(zip(*rows)) if rows else []
    ker = nullspace(transposed)
    if not ker:
        return None
    v = ker[0]
    scale = math.lcm(*(c.denominator for c in v))
    w = [c * scale for c in v]
    g = math.gcd(*(abs(c.numerator) for c in w if c != 0))
    return [c / g for c in w]


def clear_denominators(vecs):
    """Scale rational vectors by one common lcm; returns (int_vectors, lcm)."""
    denoms = [c.denominator for v in vecs for c in map(Fraction, v)]
    scale = math.lcm(*denoms) if denoms else 1
    ints = [[int(Fraction(c) * scale) for c in v] for v in vecs]
    return ints, scale


# -- integer lattices -----------------------------------------------------------


def hnf_columns(cols):
    """Column-style Hermite normal form of the lattice spanned by int columns.

    Returns a basis: echelon columns with positive pivots (one per pivot row,
    top to bottom) and earlier columns reduced modulo each pivot in its row.
    """
    cols = [list(c) for c in cols if any(c)]
    if not cols:
        return []
    d = len(cols[0])
    start = 0
    for row in range(d):
        while True:
            active = [j for j in range(start, len(cols)) if cols[j][row] != 0]
            if len(active) <= 1:
                break
            active.sort(key=lambda j: abs(cols[j][row]))
            jm = active[0]
            for j in active[1:]:
                q = cols[j][row] // cols[jm][row]
                if q:
                    cols[j] = [a - q * b for a, b in zip(cols[j], cols[jm])]
        active = [j for j in range(start, len(cols)) if cols[j][row] != 0]
        if not active:
            continue
        j = active[0]
        cols[start], cols[j] = cols[j], cols[start]
        if cols[start][row] < 0:
            cols[start] = [-a for a in cols[start]]
        piv = cols[start][row]
        for jf in range(start):
            q = cols[jf][row] // piv
            if q:
                cols[jf] = [a - q * b for a, b in zip(cols[jf], cols[start])]
        start += 1
    return [tuple(c) for c in cols[:start] if any(c)]


def hnf_lattice(generators):
    """HNF basis of the lattice generated by rational vectors."""
    gens = [list(map(Fraction, g)) for g in generators]
    gens = [g for g in gens if any(c != 0 for c in g)]
    if not gens:
        return []
    ints, scale = clear_denominators(gens)
    basis = hnf_columns(ints)
    return [tuple(Fraction(c, scale) for c in col) for col in basis]


def integer_kernel(int_rows):
    """Lattice basis of {m in Z^k : A m = 0} for an integer matrix A (rows)."""
    if not int_rows:
        return []
    k = len(int_rows[0])
    # column-HNF on A stacked over I_k; columns whose A-part vanished give the kernel
    cols = [[int_rows[r][j] for r in range(len(int_rows))] + [int(i == j) for i in range(k)]
            for j in range(k)]
    reduced = _hnf_columns_full(cols, len(int_rows))
    out = []
    for col in reduced:
        if all(c == 0 for c in col[: len(int_rows)]):
            v = tuple(col[len(int_rows):])
            if any(v):
                out.append(v)
    return out


def _hnf_columns_full(cols, top_rows):
    """Column elimination on the top block only, keeping all columns."""
    cols = [list(c) for c in cols]
    start = 0
    for row in range(top_rows):
        while True:
            active = [j for j in range(start, len(cols)) if cols[j][row] != 0]
            if len(active) <= 1:
                break
            active.sort(key=lambda j: abs(cols[j][row]))
            jm = active[0]
            for j in active[1:]:
                q = cols[j][row] // cols[jm][row]
                if q:
                    cols[j] = [a - q * b for a, b in zip(cols[j], cols[jm])]
        active = [j for j in range(start, len(cols)) if cols[j][row] != 0]
        if not active:
            continue
        j = active[0]
        cols[start], cols[j] = cols[j], cols[start]
        start += 1
    return [tuple(c) for c in cols]


def congruence_lattice(fracs):
    """Basis of {m in Z^r : sum m_j f_j in Z} for rational f_j."""
    r = len(fracs)
    if r == 0:
        return []
    fr = [Fraction(f) for f in fracs]
    v = math.lcm(*(f.denominator for f in fr))
    row = [int(f * v) for f in fr] + [v]
    ker = integer_kernel([row])
    # drop the auxiliary last coordinate; projection is injective on the kernel
    return [m[:-1] for m in ker]


def lattice_member(basis, target):
    """Integer coordinates of target in the lattice basis, or None.

    basis: rational vectors; target: rational vector.
    """
    if not basis:
        return [] if all(Fraction(c) == 0 for c in target) else None
    mat = [[Fraction(b[i]) for b in basis] for i in range(len(target))]
    x = solve(mat, target)
    if x is None:
        return None
    if any(c.denominator != 1 for c in x):
        return None
    return [int(c) for c in x]


def gram(vectors, dot):
    return [[dot(u, v) for v in vectors] for u in vectors]


def shortest_vector(basis, dot, norm_sq=None):
    """Shortest nonzero vector of a rank<=4 lattice by bounded enumeration.

    dot(u, v) must return exact rationals.  Ties break lexicographically on
    the coefficient tuple, preferring the sign making the first nonzero
    numeric coordinate positive; callers canonicalize signs afterwards.
    """
    r = len(basis)
    if r == 0:
        return None, None
    G = gram(basis, dot)
    best_norm = min(G[i][i] for i in range(r))
    # coefficient bound: |m_i| <= sqrt(best_norm * (G^-1)_ii)
    Ginv_diag = []
    for i in range(r):
        e = [Fraction(int(j == i)) for j in range(r)]
        col = solve(G, e)
        Ginv_diag.append(col[i])
    bounds = [int(math.isqrt(int(best_norm * gii)) + 1) for gii in Ginv_diag]
    best = None
    best_m = None
    for m in itertools.product(*(range(-b, b + 1) for b in bounds)):
        if not any(m):
            continue
        n = Fraction(0)
        for i in range(r):
            if m[i] == 0:
                continue
            for j in range(r):
                if m[j] != 0:
                    n += m[i] * m[j] * G[i][j]
        if best is None or n < best or (n == best and m < best_m):
            best = n
            best_m = m
    vec = None
    if best_m is not None:
        vec = best_m
    return vec, best


def complete_primitive(m):
    """Unimodular integer matrix whose first column is the primitive vector m."""
    k = len(m)
    g = math.gcd(*map(abs, m))
    if g != 1:
        raise ValueError("vector is not primitive")
    # track U with U @ m_original = current; do row ops until m = e_1 * 1
    cur = list(m)
    U = [[int(i == j) for j in range(k)] for i in range(k)]  # cur = U @ m

    def rowop(i, j, q):  # cur[i] -= q*cur[j]
        cur[i] -= q * cur[j]
        for t in range(k):
            U[i][t] -= q * U[j][t]

    while True:
        nz = [i for i in range(k) if cur[i] != 0]
        if len(nz) == 1:
            break
        nz.sort(key=lambda i: abs(cur[i]))
        i0 = nz[0]
        for i in nz[1:]:
            rowop(i, i0, cur[i] // cur[i0])
    i0 = next(i for i in range(k) if cur[i] != 0)
    if i0 != 0:
        cur[0], cur[i0] = cur[i0], cur[0]
        U[0], U[i0] = U[i0], U[0]
    if cur[0] < 0:
        cur[0] = -cur[0]
        U[0] = [-x for x in U[0]]
    # U @ m = e_1, so U^-1 has first column m; invert exactly
    inv = invert_unimodular(U)
    return inv


def invert_unimodular(U):
    """Exact inverse of an integer matrix with determinant +-1."""
    k = len(U)
    aug = [[Fraction(U[i][j]) for j in range(k)] + [Fraction(int(i == j)) for j in range(k)]
           for i in range(k)]
    red, pivots = rref(aug)
    if pivots != list(range(k)):
        raise ValueError("matrix is singular")
    inv = [[red[i][k + j] for j in range(k)] for i in range(k)]
    out = [[int(c) for c in row] for row in inv]
    if any(Fraction(out[i][j]) != inv[i][j] for i in range(k) for j in range(k)):
        raise ValueError("matrix is not unimodular")
    return out
