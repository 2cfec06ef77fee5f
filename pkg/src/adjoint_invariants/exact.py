"""Small exact-rational matrix helpers (Gauss-Jordan over ``Fraction``).

Only used on matrices of size at most a few dozen: bilinear forms, Killing
forms, coordinate solves for structure constants, and determinant oracles.
Matrices are numpy object arrays whose entries are ``int`` or ``Fraction``.
"""

from fractions import Fraction

import numpy as np


def as_fraction_matrix(a):
    a = np.asarray(a, dtype=object)
    out = np.empty(a.shape, dtype=object)
    for idx, x in np.ndenumerate(a):
        out[idx] = Fraction(x)
    return out


def simplify(a):
    """Turn integral ``Fraction`` entries back into ``int``."""
    out = np.empty(a.shape, dtype=object)
    for idx, x in np.ndenumerate(a):
        x = Fraction(x)
        out[idx] = x.numerator if x.denominator == 1 else x
    return out


def row_reduce(a):
    """Reduced row echelon form; returns ``(rref, pivot_columns)``."""
    m = as_fraction_matrix(a)
    rows, cols = m.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        pivot = next((i for i in range(r, rows) if m[i, c] != 0), None)
        if pivot is None:
            continue
        if pivot != r:
            m[[r, pivot]] = m[[pivot, r]]
        m[r] = m[r] / m[r, c]
        for i in range(rows):
            if i != r and m[i, c] != 0:
                m[i] = m[i] - m[i, c] * m[r]
        pivots.append(c)
        r += 1
    return m, pivots


def rank(a):
    return len(row_reduce(a)[1])


def inverse(a):
    a = np.asarray(a, dtype=object)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("inverse of a non-square matrix")
    aug = np.concatenate([a, np.eye(n, dtype=int).astype(object)], axis=1)
    red, pivots = row_reduce(aug)
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("matrix is singular")
    return simplify(red[:, n:])


def det(a):
    """Determinant by fraction-exact elimination."""
    m = as_fraction_matrix(a)
    n = m.shape[0]
    result = Fraction(1)
    for c in range(n):
        pivot = next((i for i in range(c, n) if m[i, c] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != c:
            m[[c, pivot]] = m[[pivot, c]]
            result = -result
        result *= m[c, c]
        for i in range(c + 1, n):
            if m[i, c] != 0:
                m[i] = m[i] - (m[i, c] / m[c, c]) * m[c]
    return result


def matmul(a, b):
    return simplify(np.dot(np.asarray(a, dtype=object), np.asarray(b, dtype=object)))


def is_zero(a):
    return all(x == 0 for x in np.asarray(a, dtype=object).flat)
