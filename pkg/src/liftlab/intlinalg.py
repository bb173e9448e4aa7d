"""Exact integer linear algebra: Smith normal form and lattice quotients.

Everything here works on Python-int matrices (lists of lists or numpy
object/int64 arrays coerced to lists), so there is no overflow; sizes
are desk scale (rank <= 8 lattices).
"""

from __future__ import annotations

from fractions import Fraction


def smith_normal_form(mat):
    """Invariant factors of an integer matrix.

    Returns the diagonal of the Smith normal form as a list of
    non-negative integers d_1 | d_2 | ... (zeros trail).  Row/column
    operations only; no transform matrices are kept.
    """
    A = [[int(x) for x in row] for row in mat]
    if not A or not A[0]:
        return []
    rows, cols = len(A), len(A[0])
    diag = []
    s = 0
    while s < min(rows, cols):
        # find smallest nonzero entry in the remaining block
        piv = None
        best = None
        for i in range(s, rows):
            for j in range(s, cols):
                if A[i][j] != 0 and (best is None or abs(A[i][j]) < best):
                    best = abs(A[i][j])
                    piv = (i, j)
        if piv is None:
            break
        i, j = piv
        A[s], A[i] = A[i], A[s]
        for row in A:
            row[s], row[j] = row[j], row[s]
        # clear the edging; restart if a reduction creates a smaller pivot
        while True:
            done = True
            for i in range(s + 1, rows):
                if A[i][s] % A[s][s] != 0:
                    q = A[i][s] // A[s][s]
                    A[i] = [x - q * y for x, y in zip(A[i], A[s])]
                    A[s], A[i] = A[i], A[s]
                    done = False
                elif A[i][s] != 0:
                    q = A[i][s] // A[s][s]
                    A[i] = [x - q * y for x, y in zip(A[i], A[s])]
            for j in range(s + 1, cols):
                if A[s][j] % A[s][s] != 0:
                    q = A[s][j] // A[s][s]
                    for row in A:
                        row[j] -= q * row[s]
                    for row in A:
                        row[s], row[j] = row[j], row[s]
                    done = False
                elif A[s][j] != 0:
                    q = A[s][j] // A[s][s]
                    for row in A:
                        row[j] -= q * row[s]
            if done:
                break
        # divisibility sweep: pivot must divide the rest of the block
        fixed = True
        for i in range(s + 1, rows):
            for j in range(s + 1, cols):
                if A[i][j] % A[s][s] != 0:
                    A[s] = [x + y for x, y in zip(A[s], A[i])]
                    fixed = False
                    break
            if not fixed:
                break
        if not fixed:
            continue
        diag.append(abs(A[s][s]))
        s += 1
    # normalize divisibility chain (paranoia; the sweep should ensure it)
    for k in range(len(diag) - 1):
        if diag[k] and diag[k + 1] % diag[k] != 0:
            import math
            g = math.gcd(diag[k], diag[k + 1])
            l = diag[k] * diag[k + 1] // g
            diag[k], diag[k + 1] = g, l
    return diag


def lattice_torsion(mat):
    """Invariant factors of Z^n / (column span of mat), torsion part first.

    Returns the full SNF diagonal padded with zeros for the free part:
    for an n x k matrix the quotient is Z^n/L with L spanned by the
    columns; invariant factors d_i with d_i | d_{i+1}; missing pivots
    mean free Z summands (reported as 0).
    """
    A = [[int(x) for x in row] for row in mat]
    if not A:
        return []
    n = len(A)
    diag = smith_normal_form(A)
    out = [d for d in diag]
    while len(out) < n:
        out.append(0)
    return out


def torsion_exponent(mat):
    """Exponent of the torsion subgroup of Z^n / column-span(mat)."""
    facs = [d for d in lattice_torsion(mat) if d != 0]
    exp = 1
    for d in facs:
        exp = exp * d // _gcd(exp, d)
    return exp


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def rational_rank(mat):
    """Rank over Q by fraction-free Gaussian elimination."""
    A = [[Fraction(int(x)) for x in row] for row in mat]
    if not A or not A[0]:
        return 0
    rows, cols = len(A), len(A[0])
    rank = 0
    for col in range(cols):
        piv = None
        for row in range(rank, rows):
            if A[row][col] != 0:
                piv = row
                break
        if piv is None:
            continue
        A[rank], A[piv] = A[piv], A[rank]
        inv = A[rank][col]
        A[rank] = [x / inv for x in A[rank]]
        for row in range(rows):
            if row != rank and A[row][col] != 0:
                c = A[row][col]
                A[row] = [x - c * y for x, y in zip(A[row], A[rank])]
        rank += 1
        if rank == rows:
            break
    return rank


def in_rational_span(vectors, v):
    """True iff v lies in the Q-span of the given integer vectors."""
    if not vectors:
        return all(x == 0 for x in v)
    base = [list(u) for u in vectors]
    return rational_rank(base) == rational_rank(base + [list(v)])


def solve_rational(mat, rhs):
    """One rational solution x of mat @ x = rhs, or None.

    mat is a list of integer (or Fraction) rows; rhs a vector.
    """
    rows = len(mat)
    cols = len(mat[0]) if rows else 0
    A = [[Fraction(x) for x in row] + [Fraction(rhs[i])] for i, row in enumerate(mat)]
    pivots = []
    rank = 0
    for col in range(cols):
        piv = None
        for row in range(rank, rows):
            if A[row][col] != 0:
                piv = row
                break
        if piv is None:
            continue
        A[rank], A[piv] = A[piv], A[rank]
        inv = A[rank][col]
        A[rank] = [x / inv for x in A[rank]]
        for row in range(rows):
            if row != rank and A[row][col] != 0:
                c = A[row][col]
                A[row] = [x - c * y for x, y in zip(A[row], A[rank])]
        pivots.append(col)
        rank += 1
    for row in range(rank, rows):
        if A[row][cols] != 0:
            return None
    x = [Fraction(0)] * cols
    for k, col in enumerate(pivots):
        x[col] = A[k][cols]
    return x
