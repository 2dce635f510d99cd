"""Small exact matrix helpers: integer determinants, Hermite/Smith forms,
rational solving, and Gram-based LLL.

Matrices are tuples/lists of row tuples.  Sizes stay tiny (rank <= 17), so
clarity beats asymptotics everywhere here.
"""

from __future__ import annotations

from fractions import Fraction


def identity(n: int):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def transpose(m):
    return [list(col) for col in zip(*m)]


def matmul(a, b):
    bt = list(zip(*b))
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def conjugate(u, g):
    """u * g * u^T for a basis-change matrix u acting on a Gram matrix g."""
    return matmul(matmul(u, g), transpose(u))


def det_bareiss(m) -> int:
    """Determinant of an integer matrix by fraction-free elimination."""
    a = [list(map(int, row)) for row in m]
    n = len(a)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def solve_rational(a, b):
    """Solve a x = b exactly (a invertible, entries int/Fraction)."""
    n = len(a)
    m = [[Fraction(a[i][j]) for j in range(n)] + [Fraction(b[i])]
         for i in range(n)]
    for col in range(n):
        piv = next(i for i in range(col, n) if m[i][col] != 0)
        m[col], m[piv] = m[piv], m[col]
        pv = m[col][col]
        m[col] = [x / pv for x in m[col]]
        for i in range(n):
            if i != col and m[i][col] != 0:
                f = m[i][col]
                m[i] = [x - f * y for x, y in zip(m[i], m[col])]
    return [m[i][n] for i in range(n)]


def inverse_rational(a):
    n = len(a)
    cols = []
    for j in range(n):
        e = [1 if i == j else 0 for i in range(n)]
        cols.append(solve_rational(a, e))
    return transpose(cols)


def hnf_rows(rows):
    """Row-style Hermite normal form of an integer matrix with full column
    rank; returns a square upper-triangular basis of the row span."""
    a = [list(map(int, r)) for r in rows]
    ncols = len(a[0])
    basis = []
    pivot_col = 0
    while pivot_col < ncols:
        live = [r for r in a if any(r[pivot_col:])]
        a = live
        # reduce column pivot_col by gcd steps
        rows_with = [r for r in a if r[pivot_col] != 0]
        if not rows_with:
            raise ValueError("rows do not span full rank")
        while True:
            rows_with = sorted((r for r in a if r[pivot_col] != 0),
                               key=lambda r: abs(r[pivot_col]))
            if len(rows_with) == 1:
                break
            r0 = rows_with[0]
            for r in rows_with[1:]:
                q = r[pivot_col] // r0[pivot_col]
                for j in range(ncols):
                    r[j] -= q * r0[j]
        piv = rows_with[0]
        if piv[pivot_col] < 0:
            for j in range(ncols):
                piv[j] = -piv[j]
        a.remove(piv)
        basis.append(piv)
        pivot_col += 1
    # reduce above-diagonal entries
    n = len(basis)
    for i in range(n - 1, -1, -1):
        for k in range(i):
            q = basis[k][i] // basis[i][i]
            if q:
                for j in range(len(basis[0])):
                    basis[k][j] -= q * basis[i][j]
    return basis


def snf_diagonal(m) -> list:
    """Nonzero elementary divisors of an integer matrix (Smith form)."""
    from sympy import Matrix, ZZ
    from sympy.matrices.normalforms import smith_normal_form
    s = smith_normal_form(Matrix(m), domain=ZZ)
    out = []
    for i in range(min(s.shape)):
        v = int(s[i, i])
        if v:
            out.append(abs(v))
    return out


def lll_gram(g, delta=Fraction(3, 4)):
    """LLL-reduce a positive definite Gram matrix.

    Returns (g', u) with g' = u g u^T, u unimodular.  Works purely from the
    Gram matrix; Gram-Schmidt data is recomputed after each swap, which is
    plenty fast at our sizes.
    """
    n = len(g)
    g = [list(map(Fraction, row)) for row in g]
    u = identity(n)

    def gso():
        mu = [[Fraction(0)] * n for _ in range(n)]
        bstar = [Fraction(0)] * n
        for i in range(n):
            bstar[i] = g[i][i]
            for j in range(i):
                mu[i][j] = (g[i][j]
                            - sum(mu[i][k] * mu[j][k] * bstar[k]
                                  for k in range(j))) / bstar[j]
                bstar[i] -= mu[i][j] ** 2 * bstar[j]
        return mu, bstar

    def size_reduce(k, mu):
        for j in range(k - 1, -1, -1):
            q = round(mu[k][j])
            if q:
                for t in range(n):
                    u[k][t] -= q * u[j][t]
                for t in range(n):
                    g[k][t] -= q * g[j][t]
                for t in range(n):
                    g[t][k] -= q * g[t][j]
                for t in range(j):
                    mu[k][t] -= q * mu[j][t]
                mu[k][j] -= q

    k = 1
    mu, bstar = gso()
    while k < n:
        size_reduce(k, mu)
        if bstar[k] >= (delta - mu[k][k - 1] ** 2) * bstar[k - 1]:
            k += 1
        else:
            g[k], g[k - 1] = g[k - 1], g[k]
            for row in g:
                row[k], row[k - 1] = row[k - 1], row[k]
            u[k], u[k - 1] = u[k - 1], u[k]
            k = max(k - 1, 1)
            mu, bstar = gso()
    # sort rows by diagonal, keeping the transform in sync
    order = sorted(range(n), key=lambda i: g[i][i])
    g2 = [[g[i][j] for j in order] for i in order]
    u2 = [u[i] for i in order]
    g2 = [[int(x) for x in row] for row in g2]
    return g2, u2
