"""Convex-geometry predicates on finite point sets.

Polytopes are kept as generating points only.  Membership, relative
interiors and intersections are all decided by small linear programs, so in
exact mode every predicate is a decision procedure.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import linprog
from ._numeric import Arith, infer_arith
from .linprog import INF, LinearProgram


@dataclass
class AffineSubspace:
    base: np.ndarray
    basis: np.ndarray  # (dim, d), rows linearly independent
    arith: Arith

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def ambient(self) -> int:
        return self.base.shape[0]

    def contains(self, x) -> bool:
        v = np.asarray(x) - self.base
        if self.dim == 0:
            return all(self.arith.is_zero(t) for t in v)
        return _independent_rows(np.vstack([self.basis, v[None, :]]), self.arith) == self.dim


def _independent_rows(vectors: np.ndarray, arith: Arith) -> int:
    if len(vectors) == 0:
        return 0
    if not arith.exact:
        return int(np.linalg.matrix_rank(np.asarray(vectors, dtype=float), tol=arith.tol))
    return len(_greedy_basis(vectors, arith))


def _greedy_basis(vectors, arith: Arith) -> list[int]:
    """Indices of a maximal linearly independent prefix-greedy subset."""
    if not arith.exact:
        chosen: list[int] = []
        for k, v in enumerate(vectors):
            trial = np.asarray([vectors[c] for c in chosen] + [v], dtype=float)
            if np.linalg.matrix_rank(trial, tol=arith.tol) == len(chosen) + 1:
                chosen.append(k)
        return chosen
    # exact incremental elimination
    echelon: list[tuple[int, list]] = []
    chosen = []
    for k, v in enumerate(vectors):
        r = list(v)
        for col, row in echelon:
            if r[col] != 0:
                f = r[col] / row[col]
                r = [a - f * b for a, b in zip(r, row)]
        piv = next((c for c, a in enumerate(r) if a != 0), None)
        if piv is not None:
            echelon.append((piv, r))
            chosen.append(k)
    return chosen


def affine_hull(points, arith: Arith | None = None) -> AffineSubspace:
    """Smallest affine subspace through ``points``."""
    pts = np.asarray(points, dtype=object)
    if pts.ndim == 1:
        pts = pts.reshape(-1, 1)
    if len(pts) == 0:
        raise ValueError("affine hull of an empty set")
    if arith is None:
        arith = infer_arith(pts)
    pts = arith.array(pts)
    base = pts[0]
    diffs = pts[1:] - base
    idx = _greedy_basis(diffs, arith)
    basis = diffs[idx] if idx else arith.zeros((0, pts.shape[1]))
    return AffineSubspace(base, basis.reshape(len(idx), pts.shape[1]), arith)


class Polytope:
    """conv of finitely many generating points."""

    def __init__(self, points, arith: Arith | None = None):
        pts = np.asarray(points, dtype=object)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1)
        if len(pts) == 0:
            raise ValueError("a polytope needs at least one generating point")
        if arith is None:
            arith = infer_arith(pts)
        self.arith = arith
        pts = arith.array(pts)
        seen, uniq = set(), []
        for p in pts:
            if tuple(p) not in seen:
                seen.add(tuple(p))
                uniq.append(p)
        self.points = arith.array(uniq) if arith.exact else np.array(uniq, dtype=float)
        self.points = self.points.reshape(len(uniq), pts.shape[1])

    @property
    def ambient(self) -> int:
        return self.points.shape[1]

    @cached_property
    def hull(self) -> AffineSubspace:
        return affine_hull(self.points, self.arith)

    @property
    def dim(self) -> int:
        return self.hull.dim

    @cached_property
    def vertices(self) -> np.ndarray:
        """Generators that are not convex combinations of the others."""
        keep = []
        for k in range(len(self.points)):
            others = np.delete(self.points, k, axis=0)
            if len(others) == 0 or not _in_conv(others, self.points[k], self.arith):
                keep.append(k)
        return self.points[keep]

    def __repr__(self) -> str:
        return f"Polytope(dim={self.dim}, n_points={len(self.points)})"


def _as_polytope(P, arith=None) -> Polytope:
    return P if isinstance(P, Polytope) else Polytope(P, arith)


def _in_conv(points, x, arith: Arith) -> bool:
    k, d = points.shape
    entries = [(r, s, points[s, r]) for r in range(d) for s in range(k) if points[s, r] != 0]
    entries += [(d, s, 1) for s in range(k)]
    lp = LinearProgram(k, entries, ["="] * (d + 1), list(x) + [1], arith=arith)
    return linprog.FeasibleRegion(lp).feasible


def _joint(P1: Polytope, P2: Polytope):
    ar = P1.arith.join(P2.arith)
    if ar.exact == P1.arith.exact == P2.arith.exact:
        return P1, P2, ar
    return Polytope(P1.points.astype(float), ar), Polytope(P2.points.astype(float), ar), ar


def _point(P: Polytope, x):
    x = np.asarray(x, dtype=object).ravel()
    return P.arith.array(x.astype(float) if not P.arith.exact else x)


def closure_contains(P, x) -> bool:
    """x in conv(P)."""
    P = _as_polytope(P)
    x = _point(P, x)
    return _in_conv(P.points, x, P.arith)


def ri_contains(P, x) -> bool:
    """x in ri conv(P): some representation puts positive weight on every generator."""
    P = _as_polytope(P)
    ar = P.arith
    x = _point(P, x)
    pts = P.points
    k, d = pts.shape
    eps = k
    entries = [(r, s, pts[s, r]) for r in range(d) for s in range(k) if pts[s, r] != 0]
    entries += [(d, s, 1) for s in range(k)]
    entries += [(d + 1 + s, s, 1) for s in range(k)] + [(d + 1 + s, eps, -1) for s in range(k)]
    senses = ["="] * (d + 1) + [">="] * k
    rhs = list(x) + [1] + [0] * k
    obj = [0] * k + [1]
    lower = [0] * k + [-INF]
    upper = [INF] * k + [1]
    lp = LinearProgram(k + 1, entries, senses, rhs, obj, "max", lower, upper, ar)
    sol = linprog.solve(lp)
    return sol.optimal and ar.is_pos(sol.objective)


def ri_intersects(P1, P2) -> bool:
    """ri conv(P1) and ri conv(P2) share a point."""
    P1, P2 = _as_polytope(P1), _as_polytope(P2)
    if P1.ambient != P2.ambient:
        raise ValueError("polytopes live in different dimensions")
    P1, P2, ar = _joint(P1, P2)
    a, b = P1.points, P2.points
    k1, k2, d = len(a), len(b), P1.ambient
    n = k1 + k2 + 1
    eps = n - 1
    entries = []
    for r in range(d):
        entries += [(r, s, a[s, r]) for s in range(k1) if a[s, r] != 0]
        entries += [(r, k1 + s, -b[s, r]) for s in range(k2) if b[s, r] != 0]
    entries += [(d, s, 1) for s in range(k1)] + [(d + 1, k1 + s, 1) for s in range(k2)]
    for s in range(k1 + k2):
        entries += [(d + 2 + s, s, 1), (d + 2 + s, eps, -1)]
    senses = ["="] * (d + 2) + [">="] * (k1 + k2)
    rhs = [0] * d + [1, 1] + [0] * (k1 + k2)
    obj = [0] * (n - 1) + [1]
    lower = [0] * (n - 1) + [-INF]
    upper = [INF] * (n - 1) + [1]
    lp = LinearProgram(n, entries, senses, rhs, obj, "max", lower, upper, ar)
    sol = linprog.solve(lp)
    return sol.optimal and ar.is_pos(sol.objective)


def hull_equal(P1, P2) -> bool:
    """conv(P1) == conv(P2) as sets."""
    P1, P2 = _as_polytope(P1), _as_polytope(P2)
    if P1.ambient != P2.ambient:
        return False
    P1, P2, _ = _joint(P1, P2)
    if P1.dim != P2.dim:
        return False
    return (all(closure_contains(P2, p) for p in P1.points)
            and all(closure_contains(P1, p) for p in P2.points))
