"""Brute-force references used by the property and acceptance suites."""
from __future__ import annotations

import itertools
from fractions import Fraction as F

from gmpy2 import mpq


def _rref(rows):
    """Reduced row echelon form of a list of mpq rows; returns (rows, pivot columns)."""
    M = [list(r) for r in rows]
    pivots = []
    r = 0
    width = len(M[0]) if M else 0
    for c in range(width):
        p = next((k for k in range(r, len(M)) if M[k][c] != 0), None)
        if p is None:
            continue
        M[r], M[p] = M[p], M[r]
        inv = 1 / M[r][c]
        M[r] = [v * inv for v in M[r]]
        for k in range(len(M)):
            if k != r and M[k][c] != 0:
                f = M[k][c]
                M[k] = [a - f * b for a, b in zip(M[k], M[r])]
        pivots.append(c)
        r += 1
    return M[:r], pivots


def polytope_vertices(A, b):
    """Vertices of ``{q >= 0 : A q = b}``, one basic solution per column basis.

    After dropping dependent rows every vertex is the basic solution of
    some set of ``rank`` linearly independent columns.
    """
    n = len(A[0])
    aug = [[mpq(v) for v in row] + [mpq(rhs)] for row, rhs in zip(A, b)]
    red, piv = _rref(aug)
    if piv and piv[-1] == n:
        return set()  # inconsistent system
    rank = len(red)
    out = set()
    for S in itertools.combinations(range(n), rank):
        sub = [[row[j] for j in S] + [row[n]] for row in red]
        M, p = _rref(sub)
        if len(p) < rank or p[-1] == rank:
            continue  # singular basis
        sol = [M[k][rank] for k in range(rank)]
        if any(v < 0 for v in sol):
            continue
        q = [mpq(0)] * n
        for j, v in zip(S, sol):
            q[j] = v
        out.add(tuple(F(int(v.numerator), int(v.denominator)) for v in q))
    return out


def competitor_system(mass, ys):
    """Equality system of the competitors of ``mass`` (rows x, cols y)."""
    a, b = len(mass), len(ys)
    d = len(ys[0])
    A, rhs = [], []
    for i in range(a):
        A.append([F(int(k // b == i)) for k in range(a * b)])
        rhs.append(sum(mass[i]))
    for j in range(b):
        A.append([F(int(k % b == j)) for k in range(a * b)])
        rhs.append(sum(mass[i][j] for i in range(a)))
    for i in range(a):
        for r in range(d):
            A.append([F(ys[k % b][r]) if k // b == i else F(0) for k in range(a * b)])
            rhs.append(sum(mass[i][j] * ys[j][r] for j in range(b)))
    return A, rhs


def competitor_max_bruteforce(mass, ys, cost):
    A, rhs = competitor_system(mass, ys)
    b = len(ys)
    return max(sum(cost[k // b][k % b] * q[k] for k in range(len(q)))
               for q in polytope_vertices(A, rhs))
