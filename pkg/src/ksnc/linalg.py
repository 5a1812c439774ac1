"""Exact linear algebra over the rationals (``fractions.Fraction``) and the integers."""
from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Sequence

Matrix = list[list[Fraction]]


def to_fraction_matrix(rows: Sequence[Sequence]) -> Matrix:
    return [[Fraction(x) for x in row] for row in rows]


def rref(rows: Sequence[Sequence]) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and the pivot column indices.

    Zero rows are dropped from the result, so ``len(pivots)`` is the rank.
    """
    m = to_fraction_matrix(rows)
    if not m:
        return [], []
    n_cols = len(m[0])
    pivots = []
    r = 0
    for c in range(n_cols):
        p = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        piv = m[r][c]
        if piv != 1:
            m[r] = [x / piv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(rows: Sequence[Sequence]) -> int:
    return len(rref(rows)[1])


def solve_affine(a: Sequence[Sequence], b: Sequence) -> tuple[list[Fraction], list[list[Fraction]]] | None:
    """Parameterize ``{x : a x = b}`` as ``particular + span(null_basis)``.

    Returns None when the system is inconsistent.  The null-space basis has
    one vector per free column, with a 1 in that column.
    """
    n = len(a[0]) if a else 0
    aug = [list(row) + [bi] for row, bi in zip(a, b)]
    red, pivots = rref(aug)
    if n in pivots:
        return None
    particular = [Fraction(0)] * n
    for row, p in zip(red, pivots):
        particular[p] = row[n]
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for row, p in zip(red, pivots):
            v[p] = -row[f]
        basis.append(v)
    return particular, basis


def primitive(v: Sequence[int]) -> tuple[int, ...]:
    """Divide an integer vector by the gcd of its entries."""
    g = 0
    for x in v:
        g = gcd(g, x)
    if g in (0, 1):
        return tuple(v)
    return tuple(x // g for x in v)


def integer_row(row: Sequence[Fraction]) -> tuple[int, ...]:
    """Smallest positive multiple of a rational row that is integral."""
    den = 1
    for x in row:
        den = lcm(den, Fraction(x).denominator)
    return primitive([int(Fraction(x) * den) for x in row])


def integer_inverse_columns(a: Sequence[Sequence[int]]) -> list[tuple[int, ...]]:
    """Columns of ``a^{-1}``, each scaled to a primitive integer vector with the original sign.

    ``a`` must be square and nonsingular.
    """
    n = len(a)
    aug = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(a)]
    red, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise ValueError("matrix is singular")
    cols = []
    for j in range(n):
        cols.append(integer_row([red[i][n + j] for i in range(n)]))
    return cols
