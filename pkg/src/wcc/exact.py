"""Exact integer/rational linear algebra used where floating point is not allowed."""

from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import Sequence


def bareiss_det(matrix: Sequence[Sequence[int]]) -> int:
    """Determinant of an integer matrix by fraction-free Bareiss elimination."""
    a = [list(map(int, row)) for row in matrix]
    n = len(a)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for r in range(k + 1, n):
                if a[r][k] != 0:
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return 0
        pivot = a[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * pivot - a[i][k] * a[k][j]) // prev
            a[i][k] = 0
        prev = pivot
    return sign * a[n - 1][n - 1]


def rational_det(matrix: Sequence[Sequence[Fraction]]) -> Fraction:
    """Determinant of a rational matrix: clear each row's denominators, then Bareiss."""
    scale = Fraction(1)
    rows = []
    for row in matrix:
        row = [Fraction(x) for x in row]
        d = lcm(*(x.denominator for x in row)) if row else 1
        rows.append([int(x * d) for x in row])
        scale *= d
    return Fraction(bareiss_det(rows)) / scale


def cofactor(matrix: Sequence[Sequence[Fraction]], row: int, col: int) -> Fraction:
    """The signed ``(row, col)`` cofactor."""
    minor = [
        [x for j, x in enumerate(r) if j != col] for i, r in enumerate(matrix) if i != row
    ]
    sign = -1 if (row + col) % 2 else 1
    return sign * rational_det(minor)


def solve(a: Sequence[Sequence[Fraction]], b: Sequence[Fraction]) -> list[Fraction]:
    """Solve a square nonsingular rational system by Gauss-Jordan elimination."""
    n = len(a)
    m = [[Fraction(x) for x in row] + [Fraction(bi)] for row, bi in zip(a, b)]
    for k in range(n):
        piv = next((r for r in range(k, n) if m[r][k] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular system")
        m[k], m[piv] = m[piv], m[k]
        inv = 1 / m[k][k]
        m[k] = [x * inv for x in m[k]]
        for r in range(n):
            if r != k and m[r][k] != 0:
                f = m[r][k]
                m[r] = [x - f * y for x, y in zip(m[r], m[k])]
    return [m[i][n] for i in range(n)]
