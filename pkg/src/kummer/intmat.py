"""Exact integer / rational matrix helpers.

Matrices are plain tuples (or lists) of rows; entries are Python ints or
:class:`fractions.Fraction`.  Everything here is exact and intended for the
small ranks (<= 8) that occur in this package.
"""

from __future__ import annotations

import functools
from fractions import Fraction
from math import gcd
from typing import Sequence

Matrix = Sequence[Sequence]


def normalize(x):
    """Collapse a Fraction with denominator 1 to an int."""
    if isinstance(x, Fraction) and x.denominator == 1:
        return x.numerator
    return x


def identity(n: int) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))


def transpose(m: Matrix) -> tuple[tuple, ...]:
    return tuple(zip(*m))


def matmul(a: Matrix, b: Matrix) -> tuple[tuple, ...]:
    bt = tuple(zip(*b))
    return tuple(
        tuple(normalize(sum(x * y for x, y in zip(row, col))) for col in bt)
        for row in a
    )


def matvec(a: Matrix, v: Sequence) -> tuple:
    return tuple(normalize(sum(x * y for x, y in zip(row, v))) for row in a)


def dot(u: Sequence, v: Sequence):
    return sum(x * y for x, y in zip(u, v))


@functools.lru_cache(maxsize=64)
def sparse_rows(gram) -> tuple[tuple[tuple[int, int], ...], ...]:
    """Nonzero ``(j, g_ij)`` entries of each row of a (hashable) Gram matrix."""
    return tuple(tuple((j, x) for j, x in enumerate(row) if x) for row in gram)


def content(v: Sequence[int]) -> int:
    """gcd of the entries (0 for the zero vector)."""
    g = 0
    for x in v:
        g = gcd(g, x)
        if g == 1:
            break
    return g


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, x, y) with a*x + b*y = g = gcd(a, b) >= 0."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def det(m: Matrix):
    """Exact determinant by fraction Gaussian elimination."""
    n = len(m)
    if n == 0:
        return 1
    a = [[Fraction(x) for x in row] for row in m]
    sign = 1
    result = Fraction(1)
    for k in range(n):
        piv = next((i for i in range(k, n) if a[i][k] != 0), None)
        if piv is None:
            return 0
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            sign = -sign
        p = a[k][k]
        result *= p
        for i in range(k + 1, n):
            if a[i][k]:
                f = a[i][k] / p
                row_k = a[k]
                a[i] = [x - f * y for x, y in zip(a[i], row_k)]
    return normalize(sign * result)


def inverse(m: Matrix) -> tuple[tuple, ...]:
    """Exact inverse over the rationals; raises ZeroDivisionError if singular."""
    n = len(m)
    a = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(m)]
    for k in range(n):
        piv = next((i for i in range(k, n) if a[i][k] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        a[k], a[piv] = a[piv], a[k]
        p = a[k][k]
        a[k] = [x / p for x in a[k]]
        for i in range(n):
            if i != k and a[i][k]:
                f = a[i][k]
                a[i] = [x - f * y for x, y in zip(a[i], a[k])]
    return tuple(tuple(normalize(x) for x in row[n:]) for row in a)


def rank(m: Matrix) -> int:
    rows = [[Fraction(x) for x in row] for row in m]
    if not rows:
        return 0
    ncols = len(rows[0])
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        for i in range(r + 1, len(rows)):
            if rows[i][c]:
                f = rows[i][c] / rows[r][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        r += 1
        if r == len(rows):
            break
    return r


def hnf(rows: Sequence[Sequence[int]]) -> tuple[tuple[int, ...], ...]:
    """Row-style Hermite normal form of the integer row span.

    Returns only the nonzero rows.  Pivots are positive and entries above a
    pivot are reduced into ``[0, pivot)``, so two generating sets span the
    same lattice iff their HNFs are equal.
    """
    a = [list(r) for r in rows if any(r)]
    if not a:
        return ()
    ncols = len(a[0])
    r = 0
    pivots = []
    for c in range(ncols):
        while True:
            nz = [i for i in range(r, len(a)) if a[i][c]]
            if not nz:
                break
            best = min(nz, key=lambda i: abs(a[i][c]))
            a[r], a[best] = a[best], a[r]
            done = True
            for i in range(r + 1, len(a)):
                if a[i][c]:
                    q = a[i][c] // a[r][c]
                    a[i] = [x - q * y for x, y in zip(a[i], a[r])]
                    if a[i][c]:
                        done = False
            if done:
                break
        if r < len(a) and a[r][c]:
            if a[r][c] < 0:
                a[r] = [-x for x in a[r]]
            pivots.append((r, c))
            r += 1
            if r == len(a):
                break
    a = a[:r]
    for pr, pc in pivots:
        p = a[pr][pc]
        for i in range(pr):
            q = a[i][pc] // p
            if q:
                a[i] = [x - q * y for x, y in zip(a[i], a[pr])]
    return tuple(tuple(row) for row in a)


def integer_kernel(m: Sequence[Sequence[int]], ncols: int | None = None
                   ) -> tuple[tuple[int, ...], ...]:
    """Basis (rows, in HNF) of ``{x in Z^n : m x = 0}``.

    Column Euclid with a tracked unimodular transform; the returned lattice is
    the full integer kernel, hence saturated.
    """
    if ncols is None:
        ncols = len(m[0])
    cols = [[list(row[j] for row in m), [int(i == j) for i in range(ncols)]]
            for j in range(ncols)]
    active = list(range(ncols))
    for r in range(len(m)):
        while True:
            nz = [j for j in active if cols[j][0][r]]
            if len(nz) <= 1:
                break
            p = min(nz, key=lambda j: abs(cols[j][0][r]))
            pv = cols[p][0][r]
            for j in nz:
                if j == p:
                    continue
                q = cols[j][0][r] // pv
                cj, cp = cols[j], cols[p]
                cj[0] = [x - q * y for x, y in zip(cj[0], cp[0])]
                cj[1] = [x - q * y for x, y in zip(cj[1], cp[1])]
        if nz:
            active.remove(nz[0])
    return hnf([cols[j][1] for j in active])


def smith_form(m: Sequence[Sequence[int]]):
    """Smith normal form ``U m V = D`` of a square integer matrix.

    Returns ``(diag, U, V)`` where ``diag`` lists the nonnegative invariant
    factors (each dividing the next) and U, V are unimodular.
    """
    n = len(m)
    a = [list(r) for r in m]
    u = [list(r) for r in identity(n)]
    v = [list(r) for r in identity(n)]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):  # row dst -= q * row src
        a[dst] = [x - q * y for x, y in zip(a[dst], a[src])]
        u[dst] = [x - q * y for x, y in zip(u[dst], u[src])]

    def add_col(dst, src, q):  # col dst -= q * col src
        for row in a:
            row[dst] -= q * row[src]
        for row in v:
            row[dst] -= q * row[src]

    for k in range(n):
        while True:
            entries = [(abs(a[i][j]), i, j) for i in range(k, n)
                       for j in range(k, n) if a[i][j]]
            if not entries:
                break
            _, i, j = min(entries)
            swap_rows(k, i)
            swap_cols(k, j)
            p = a[k][k]
            clean = True
            for i in range(k + 1, n):
                if a[i][k]:
                    add_row(i, k, a[i][k] // p)
                    clean = clean and a[i][k] == 0
            for j in range(k + 1, n):
                if a[k][j]:
                    add_col(j, k, a[k][j] // p)
                    clean = clean and a[k][j] == 0
            if not clean:
                continue
            bad = next(((i, j) for i in range(k + 1, n) for j in range(k + 1, n)
                        if a[i][j] % p), None)
            if bad is None:
                break
            # pull a non-divisible entry into row k and repeat
            a[k] = [x + y for x, y in zip(a[k], a[bad[0]])]
            u[k] = [x + y for x, y in zip(u[k], u[bad[0]])]
        if a[k][k] < 0:
            a[k] = [-x for x in a[k]]
            u[k] = [-x for x in u[k]]
    diag = [a[i][i] for i in range(n)]
    return diag, tuple(map(tuple, u)), tuple(map(tuple, v))
