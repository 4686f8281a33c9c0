"""Exact dense linear algebra over any field whose elements support
``+ - * /`` and an exact ``== 0`` test (ints promote to Fraction).

Matrices are lists of rows. Nothing here mutates its arguments.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence


def _field(x):
    return Fraction(x) if isinstance(x, int) else x


def det(rows: Sequence[Sequence]) -> object:
    """Determinant. Integer input uses fraction-free Bareiss elimination."""
    n = len(rows)
    if n == 0:
        return 1
    if any(len(r) != n for r in rows):
        raise ValueError("det needs a square matrix")
    if all(isinstance(x, int) for r in rows for x in r):
        return _bareiss(rows)
    a = [[_field(x) for x in r] for r in rows]
    sign = 1
    result = 1
    for c in range(n):
        p = next((r for r in range(c, n) if a[r][c] != 0), None)
        if p is None:
            return 0 * a[0][0]
        if p != c:
            a[c], a[p] = a[p], a[c]
            sign = -sign
        pivot = a[c][c]
        result = result * pivot
        for r in range(c + 1, n):
            f = a[r][c]
            if f != 0:
                f = f / pivot
                row_r, row_c = a[r], a[c]
                for k in range(c + 1, n):
                    row_r[k] = row_r[k] - f * row_c[k]
    return result if sign > 0 else -result


def _bareiss(rows: Sequence[Sequence[int]]) -> int:
    a = [list(r) for r in rows]
    n = len(a)
    sign = 1
    prev = 1
    for c in range(n - 1):
        if a[c][c] == 0:
            p = next((r for r in range(c + 1, n) if a[r][c] != 0), None)
            if p is None:
                return 0
            a[c], a[p] = a[p], a[c]
            sign = -sign
        pivot = a[c][c]
        for r in range(c + 1, n):
            row_r, row_c = a[r], a[c]
            arc = row_r[c]
            for k in range(c + 1, n):
                row_r[k] = (pivot * row_r[k] - arc * row_c[k]) // prev
        prev = pivot
    return sign * a[n - 1][n - 1]


def rref(rows: Sequence[Sequence]) -> tuple[list[list], list[int]]:
    """Reduced row echelon form and the pivot columns."""
    a = [[_field(x) for x in r] for r in rows]
    if not a:
        return a, []
    m, n = len(a), len(a[0])
    pivots: list[int] = []
    r = 0
    for c in range(n):
        p = next((i for i in range(r, m) if a[i][c] != 0), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(m):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    return a, pivots


def rank(rows: Sequence[Sequence]) -> int:
    return len(rref(rows)[1]) if rows else 0


def nullspace(rows: Sequence[Sequence], ncols: int | None = None) -> list[list]:
    """Basis of the right kernel, one vector per free column."""
    if ncols is None:
        ncols = len(rows[0])
    if not rows:
        return [[Fraction(int(i == j)) for j in range(ncols)] for i in range(ncols)]
    a, pivots = rref(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for i, p in enumerate(pivots):
            v[p] = -a[i][f]
        basis.append(v)
    return basis


def inverse(rows: Sequence[Sequence]) -> list[list]:
    n = len(rows)
    aug = [list(r) + [int(i == j) for j in range(n)] for i, r in enumerate(rows)]
    a, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("matrix is singular")
    return [row[n:] for row in a]


def solve(rows: Sequence[Sequence], rhs: Sequence) -> list:
    """Unique solution of a square system; raises ZeroDivisionError if singular."""
    n = len(rows)
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    a, pivots = rref(aug)
    if pivots != list(range(n)):
        raise ZeroDivisionError("system is singular")
    return [a[i][n] for i in range(n)]


def matmul(x: Sequence[Sequence], y: Sequence[Sequence]) -> list[list]:
    cols = list(zip(*y))
    return [[sum((a * b for a, b in zip(row, col)), 0) for col in cols] for row in x]


def matvec(x: Sequence[Sequence], v: Sequence) -> list:
    return [sum((a * b for a, b in zip(row, v)), 0) for row in x]


def identity(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]
