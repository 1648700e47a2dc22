"""Small exact integer-matrix helpers (matrices are tuples of row tuples)."""

from __future__ import annotations

from fractions import Fraction


def mat(rows) -> tuple:
    return tuple(tuple(int(x) for x in r) for r in rows)


def identity(n: int) -> tuple:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def matmul(a, b) -> tuple:
    bt = list(zip(*b))
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in bt) for row in a)


def matvec(a, v) -> tuple:
    return tuple(sum(x * y for x, y in zip(row, v)) for row in a)


def transpose(a) -> tuple:
    return tuple(zip(*a))


def det(a) -> int:
    n = len(a)
    if n == 0:
        return 1
    m = [[Fraction(x) for x in r] for r in a]
    d = Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if m[r][c]), None)
        if p is None:
            return 0
        if p != c:
            m[c], m[p] = m[p], m[c]
            d = -d
        d *= m[c][c]
        for r in range(c + 1, n):
            if m[r][c]:
                f = m[r][c] / m[c][c]
                m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return int(d)


def inverse_rational(a) -> list:
    n = len(a)
    m = [[Fraction(x) for x in r] + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(a)]
    for c in range(n):
        p = next((r for r in range(c, n) if m[r][c]), None)
        if p is None:
            raise ZeroDivisionError("singular matrix")
        m[c], m[p] = m[p], m[c]
        piv = m[c][c]
        m[c] = [x / piv for x in m[c]]
        for r in range(n):
            if r != c and m[r][c]:
                f = m[r][c]
                m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return [row[n:] for row in m]


def inverse_unimodular(a) -> tuple:
    inv = inverse_rational(a)
    out = []
    for row in inv:
        if any(x.denominator != 1 for x in row):
            raise ValueError("matrix is not unimodular")
        out.append(tuple(int(x) for x in row))
    return tuple(out)


def column(a, j) -> tuple:
    return tuple(r[j] for r in a)


def from_columns(cols) -> tuple:
    return tuple(zip(*cols)) if cols else ()


def trace(a) -> int:
    return sum(a[i][i] for i in range(len(a)))


def sub_identity(a, s=1) -> tuple:
    """a - s*I."""
    return tuple(tuple(x - (s if i == j else 0) for j, x in enumerate(r)) for i, r in enumerate(a))


def rank(a) -> int:
    m = [[Fraction(x) for x in r] for r in a]
    rk = 0
    cols = len(m[0]) if m else 0
    for c in range(cols):
        p = next((r for r in range(rk, len(m)) if m[r][c]), None)
        if p is None:
            continue
        m[rk], m[p] = m[p], m[rk]
        for r in range(len(m)):
            if r != rk and m[r][c]:
                f = m[r][c] / m[rk][c]
                m[r] = [x - f * y for x, y in zip(m[r], m[rk])]
        rk += 1
    return rk
