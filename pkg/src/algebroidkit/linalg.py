"""Exact Gaussian elimination over the rationals."""
from __future__ import annotations

from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

Matrix = List[List[Fraction]]


def to_fractions(m: Sequence[Sequence]) -> Matrix:
    return [[Fraction(v) for v in row] for row in m]


def rref(m: Sequence[Sequence]) -> Tuple[Matrix, List[int]]:
    """Reduced row echelon form and pivot columns; pivot is the first nonzero entry."""
    a = to_fractions(m)
    rows = len(a)
    cols = len(a[0]) if rows else 0
    pivots: List[int] = []
    r = 0
    for c in range(cols):
        p = next((i for i in range(r, rows) if a[i][c]), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        inv = 1 / a[r][c]
        a[r] = [v * inv for v in a[r]]
        for i in range(rows):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return a, pivots


def rank(m: Sequence[Sequence]) -> int:
    return len(rref(m)[1]) if m else 0


def solve(m: Sequence[Sequence], b: Sequence) -> Optional[List[Fraction]]:
    """One solution of m x = b (free variables set to 0), or None."""
    rows = len(m)
    cols = len(m[0]) if rows else 0
    aug = [list(row) + [b[i]] for i, row in enumerate(m)]
    if not rows:
        return []
    red, piv = rref(aug)
    if cols in piv:
        return None
    x = [Fraction(0)] * cols
    for i, c in enumerate(piv):
        x[c] = red[i][cols]
    return x


def matmul(a: Sequence[Sequence], b: Sequence[Sequence]) -> Matrix:
    inner = len(b)
    cols = len(b[0]) if inner else 0
    return [[sum((Fraction(row[k]) * b[k][j] for k in range(inner)), Fraction(0))
             for j in range(cols)] for row in a]
