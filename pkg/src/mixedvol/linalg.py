"""Exact linear algebra over the rationals.

Everything here works on tuples of Fraction; no floating point is used
anywhere.  Rank and determinant scale each row to integers (the lcm of its
denominators) and run Bareiss fraction-free elimination over plain ints:
every intermediate entry is an integer minor, so the divisions are exact
and no per-operation gcd normalization is paid.  Nullspace and span
membership use Gauss-Jordan over Fraction, which is exact as well.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable, Iterable, Sequence

Vector = tuple[Fraction, ...]


def frac_vector(values: Iterable) -> Vector:
    return tuple(Fraction(v) for v in values)


def _copy(rows: Sequence[Sequence]) -> list[list[Fraction]]:
    return [[Fraction(x) for x in row] for row in rows]


def _int_row(row: Sequence) -> tuple[list[int], int]:
    """The row scaled by the lcm of its denominators, and that lcm."""
    fr = [Fraction(x) for x in row]
    mult = 1
    for f in fr:
        mult = mult * f.denominator // math.gcd(mult, f.denominator)
    return [int(f.numerator * (mult // f.denominator)) for f in fr], mult


def bareiss_rank(rows: Sequence[Sequence]) -> int:
    """Rank via fraction-free elimination with full column pivoting.

    Row scaling never changes the rank.
    """
    a = [_int_row(row)[0] for row in rows]
    if not a or not a[0]:
        return 0
    nrows, ncols = len(a), len(a[0])
    prev = 1
    r = 0
    for col in range(ncols):
        pivot_row = next((i for i in range(r, nrows) if a[i][col]), None)
        if pivot_row is None:
            continue
        a[r], a[pivot_row] = a[pivot_row], a[r]
        top = a[r]
        piv = top[col]
        for i in range(r + 1, nrows):
            cur = a[i]
            fac = cur[col]
            for j in range(col, ncols):
                cur[j] = (cur[j] * piv - fac * top[j]) // prev
        prev = piv
        r += 1
        if r == nrows:
            break
    return r


def bareiss_det(rows: Sequence[Sequence]) -> Fraction:
    """Determinant of a square matrix; det of the empty matrix is 1."""
    n = len(rows)
    if n == 0:
        return Fraction(1)
    if any(len(row) != n for row in rows):
        raise ValueError("determinant requires a square matrix")
    a = []
    scale = 1
    for row in rows:
        ints, mult = _int_row(row)
        a.append(ints)
        scale *= mult
    sign = 1
    prev = 1
    for k in range(n - 1):
        pivot_row = next((i for i in range(k, n) if a[i][k]), None)
        if pivot_row is None:
            return Fraction(0)
        if pivot_row != k:
            a[k], a[pivot_row] = a[pivot_row], a[k]
            sign = -sign
        top = a[k]
        piv = top[k]
        for i in range(k + 1, n):
            cur = a[i]
            fac = cur[k]
            for j in range(k, n):
                cur[j] = (cur[j] * piv - fac * top[j]) // prev
        prev = piv
    return Fraction(sign * a[n - 1][n - 1], scale)


def rref(rows: Sequence[Sequence]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form; returns (nonzero rows, pivot columns)."""
    a = _copy(rows)
    if not a:
        return [], []
    nrows, ncols = len(a), len(a[0])
    pivots: list[int] = []
    r = 0
    for col in range(ncols):
        pivot_row = next((i for i in range(r, nrows) if a[i][col]), None)
        if pivot_row is None:
            continue
        a[r], a[pivot_row] = a[pivot_row], a[r]
        piv = a[r][col]
        a[r] = [x / piv for x in a[r]]
        for i in range(nrows):
            if i != r and a[i][col]:
                fac = a[i][col]
                a[i] = [x - fac * y for x, y in zip(a[i], a[r])]
        pivots.append(col)
        r += 1
        if r == nrows:
            break
    return a[:r], pivots


def nullspace(rows: Sequence[Sequence], ncols: int) -> list[Vector]:
    """Basis of {x : A x = 0} in Q^ncols, one vector per free column."""
    reduced, pivots = rref(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis: list[Vector] = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, p in zip(reduced, pivots):
            v[p] = -row[f]
        basis.append(tuple(v))
    return basis


def in_span(vectors: Sequence[Sequence], v: Sequence) -> bool:
    """Whether v lies in the linear span of the given vectors."""
    reduced, pivots = rref(vectors)
    w = [Fraction(x) for x in v]
    for row, p in zip(reduced, pivots):
        fac = w[p]
        if fac:
            w = [x - fac * y for x, y in zip(w, row)]
    return not any(w)


def quotient_map(vectors: Sequence[Sequence], ncols: int) -> Callable[[Sequence], Vector]:
    """Linear map Q^ncols -> Q^(ncols - rank) with kernel exactly span(vectors).

    Realized by reducing against the RREF of the spanning set and dropping
    the pivot coordinates.
    """
    reduced, pivots = rref(vectors)
    keep = [c for c in range(ncols) if c not in pivots]

    def project(v: Sequence) -> Vector:
        w = [Fraction(x) for x in v]
        for row, p in zip(reduced, pivots):
            fac = w[p]
            if fac:
                w = [x - fac * y for x, y in zip(w, row)]
        return tuple(w[c] for c in keep)

    return project


def mat_vec(rows: Sequence[Sequence], v: Sequence) -> Vector:
    vv = [Fraction(x) for x in v]
    return tuple(sum((Fraction(x) * y for x, y in zip(row, vv)), Fraction(0)) for row in rows)
