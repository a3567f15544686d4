"""Two-phase primal simplex with Bland's rule, exact or floating point.

Exact instances are pivoted over ``gmpy2.mpq`` and reported back as
:class:`fractions.Fraction`; float instances use float64 with an absolute
tolerance.  Every optimal solve carries row duals, every infeasible one a
Farkas ray, both checkable by substitution with :func:`check_optimality` and
:func:`verify_farkas`.

The usual entry point is :func:`solve`.  When many objectives are optimized
over the same constraints, build a :class:`FeasibleRegion` once: phase 1 runs
a single time and each objective only pays for its own phase 2.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import gmpy2
import numpy as np

from ._numeric import Arith, infer_arith, to_fraction

INF = math.inf
_FLOAT_ZERO = 1e-13


class Status(str, enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


class IterationLimit(RuntimeError):
    """The pivot cap was hit; with Bland's rule this means a kernel bug."""


@dataclass
class LinearProgram:
    """``sense`` c.x subject to rows ``A x (senses) rhs`` and variable bounds.

    ``entries`` holds the constraint matrix as ``(row, col, value)`` triplets;
    repeated positions are summed.  Lower bounds are ``0`` or ``-inf``, upper
    bounds finite or ``inf``.
    """

    n_vars: int
    entries: list
    senses: list
    rhs: list
    objective: list | None = None
    sense: str = "min"
    lower: list | None = None
    upper: list | None = None
    arith: Arith | None = None

    def __post_init__(self):
        if self.objective is None:
            self.objective = [0] * self.n_vars
        if self.lower is None:
            self.lower = [0] * self.n_vars
        if self.upper is None:
            self.upper = [INF] * self.n_vars
        if self.sense not in ("min", "max"):
            raise ValueError(f"sense must be 'min' or 'max', got {self.sense!r}")
        if len(self.senses) != len(self.rhs):
            raise ValueError("senses and rhs differ in length")
        for s in self.senses:
            if s not in ("=", "<=", ">="):
                raise ValueError(f"unknown row sense {s!r}")
        if not (len(self.objective) == len(self.lower) == len(self.upper) == self.n_vars):
            raise ValueError("objective/bounds do not match n_vars")
        for r, c, _ in self.entries:
            if not (0 <= r < self.n_rows and 0 <= c < self.n_vars):
                raise ValueError(f"entry ({r}, {c}) out of range")
        for lo, up in zip(self.lower, self.upper):
            if not (lo == 0 or lo == -INF):
                raise ValueError("lower bounds must be 0 or -inf")
            if up != INF and not (math.isfinite(float(up)) and up >= lo):
                raise ValueError(f"bad upper bound {up!r}")
        values = [v for _, _, v in self.entries] + list(self.rhs) + list(self.objective)
        values += [u for u in self.upper if u != INF]
        for v in values:
            if isinstance(v, float) and not math.isfinite(v):
                raise ValueError("NaN or infinite coefficient")
        if self.arith is None:
            self.arith = infer_arith(values)
        elif self.arith.exact:
            for v in values:
                to_fraction(v)  # raises on floats

    @property
    def n_rows(self) -> int:
        return len(self.rhs)

    def dense(self) -> np.ndarray:
        A = self.arith.zeros((self.n_rows, self.n_vars))
        for r, c, v in self.entries:
            A[r, c] += self.arith.convert(v)
        return A

    def with_objective(self, objective, sense="min") -> "LinearProgram":
        return LinearProgram(self.n_vars, self.entries, self.senses, self.rhs,
                             list(objective), sense, self.lower, self.upper, self.arith)


@dataclass
class LPSolution:
    """Outcome of a solve.

    ``duals`` and ``bound_duals`` satisfy ``objective == rhs.duals + upper.bound_duals``
    at optimality, for either sense.  ``farkas``/``farkas_bounds`` prove
    infeasibility: see :func:`verify_farkas`.
    """

    status: Status
    x: np.ndarray | None = None
    duals: np.ndarray | None = None
    bound_duals: np.ndarray | None = None
    objective: object = None
    farkas: np.ndarray | None = None
    farkas_bounds: np.ndarray | None = None
    iterations: int = 0

    @property
    def optimal(self) -> bool:
        return self.status is Status.OPTIMAL


class _StandardForm:
    """min c.z, A z = b, z >= 0, with the column/row bookkeeping to map back."""

    def __init__(self, lp: LinearProgram):
        self.lp = lp
        ar = lp.arith
        n, m = lp.n_vars, lp.n_rows
        self.pos = list(range(n))
        self.neg = {}
        ncol = n
        for j in range(n):
            if lp.lower[j] == -INF:
                self.neg[j] = ncol
                ncol += 1
        self.bounded = [j for j in range(n) if lp.upper[j] != INF]
        m_all = m + len(self.bounded)
        self.slack = {}
        for i, s in enumerate(lp.senses):
            if s != "=":
                self.slack[i] = ncol
                ncol += 1
        for k in range(len(self.bounded)):
            self.slack[m + k] = ncol
            ncol += 1
        self.n_std, self.m_std = ncol, m_all

        exact = ar.exact
        conv = (lambda v: gmpy2.mpq(to_fraction(v))) if exact else float
        if exact:
            A = np.empty((m_all, ncol), dtype=object)
            A.fill(gmpy2.mpq(0))
        else:
            A = np.zeros((m_all, ncol))
        for r, c, v in lp.entries:
            A[r, c] += conv(v)
            if c in self.neg:
                A[r, self.neg[c]] -= conv(v)
        for k, j in enumerate(self.bounded):
            A[m + k, j] += 1
            if j in self.neg:
                A[m + k, self.neg[j]] -= 1
        for i, s in enumerate(lp.senses):
            if s == "<=":
                A[i, self.slack[i]] = conv(1)
            elif s == ">=":
                A[i, self.slack[i]] = conv(-1)
        for k in range(len(self.bounded)):
            A[m + k, self.slack[m + k]] = conv(1)
        b = [conv(v) for v in lp.rhs] + [conv(lp.upper[j]) for j in self.bounded]
        self.A = A
        self.b = np.array(b, dtype=object if exact else float)
        self.conv = conv

    def cost(self, objective, sense) -> np.ndarray:
        sgn = -1 if sense == "max" else 1
        if self.lp.arith.exact:
            c = np.empty(self.n_std, dtype=object)
            c.fill(gmpy2.mpq(0))
        else:
            c = np.zeros(self.n_std)
        for j, v in enumerate(objective):
            v = self.conv(v) * sgn
            c[j] = v
            if j in self.neg:
                c[self.neg[j]] = -v
        return c

    def x_back(self, z):
        x = [z[j] - z[self.neg[j]] if j in self.neg else z[j] for j in range(self.lp.n_vars)]
        return x

    def split_rows(self, y):
        m = self.lp.n_rows
        w = [0] * self.lp.n_vars
        for k, j in enumerate(self.bounded):
            w[j] = y[m + k]
        return list(y[:m]), w


class _Tableau:
    def __init__(self, A, b, exact: bool, tol: float, max_iter: int):
        m, n = A.shape
        self.m, self.n = m, n
        self.exact = exact
        self.tol = 0 if exact else tol
        self.max_iter = max_iter
        self.iterations = 0
        self.sign = np.array([-1 if v < 0 else 1 for v in b], dtype=int)
        if exact:
            ident = np.empty((m, m), dtype=object)
            ident.fill(gmpy2.mpq(0))
            for i in range(m):
                ident[i, i] = gmpy2.mpq(1)
            T = np.hstack([A * self.sign[:, None], ident]) if m else A.copy()
            self.rhs = np.array([v * s for v, s in zip(b, self.sign)], dtype=object)
        else:
            T = np.hstack([A * self.sign[:, None], np.eye(m)])
            self.rhs = np.asarray(b, dtype=float) * self.sign
        self.T = T
        self.basis = list(range(n, n + m))
        self.redundant: list[int] = []

    def copy(self) -> "_Tableau":
        t = object.__new__(_Tableau)
        t.__dict__.update(self.__dict__)
        t.T = self.T.copy()
        t.rhs = self.rhs.copy()
        t.basis = list(self.basis)
        t.iterations = 0
        return t

    def _nonzero(self, v):
        if self.exact:
            return np.flatnonzero(v)
        return np.flatnonzero(np.abs(v) > _FLOAT_ZERO)

    def _pivot(self, i, j, obj):
        T, rhs = self.T, self.rhs
        piv = T[i, j]
        T[i] = T[i] / piv
        rhs[i] = rhs[i] / piv
        col = T[:, j].copy()
        col[i] = 0
        rows = self._nonzero(col)
        cols = self._nonzero(T[i])
        if len(rows) and len(cols):
            T[np.ix_(rows, cols)] -= np.outer(col[rows], T[i, cols])
            rhs[rows] -= col[rows] * rhs[i]
        f = obj[0][j]
        if f != 0:
            obj[0][cols] -= f * T[i, cols]
            obj[1] += f * rhs[i]
        if not self.exact:
            T[np.abs(T) < _FLOAT_ZERO] = 0.0
            rhs[np.abs(rhs) < _FLOAT_ZERO] = 0.0
        self.basis[i] = j
        self.iterations += 1
        if self.iterations > self.max_iter:
            raise IterationLimit(f"simplex exceeded {self.max_iter} pivots")

    def _run(self, obj, allowed: int) -> Status:
        """Bland's rule on columns ``< allowed``; ``obj = [reduced costs, value]``."""
        tol = self.tol
        T, rhs = self.T, self.rhs
        while True:
            r = obj[0][:allowed]
            neg = np.flatnonzero(r < -tol) if not self.exact else np.flatnonzero(r < 0)
            if len(neg) == 0:
                return Status.OPTIMAL
            j = int(neg[0])
            colj = T[:, j]
            cand = np.flatnonzero(colj > (tol if not self.exact else 0))
            if len(cand) == 0:
                return Status.UNBOUNDED
            ratios = [rhs[i] / colj[i] for i in cand]
            best = min(ratios)
            ties = [int(i) for i, q in zip(cand, ratios) if q - best <= tol]
            i = min(ties, key=lambda k: self.basis[k])
            self._pivot(i, j, obj)

    def phase1(self):
        n, m = self.n, self.m
        if self.exact:
            r = np.empty(n + m, dtype=object)
            r.fill(gmpy2.mpq(0))
            r[:n] = -self.T[:, :n].sum(axis=0) if m else r[:n]
            val = sum(self.rhs, gmpy2.mpq(0))
        else:
            r = np.zeros(n + m)
            r[:n] = -self.T[:, :n].sum(axis=0)
            val = float(self.rhs.sum())
        obj = [r, val]
        self._run(obj, n)
        feasible = not (obj[1] > (self.tol * (1 + float(np.abs(self.rhs).sum())) if not self.exact else 0))
        if not feasible:
            y = (1 - obj[0][n:]) * self.sign
            return False, y
        for i in range(m):
            if self.basis[i] < n:
                continue
            nz = self._nonzero(self.T[i, :n]) if self.exact else np.flatnonzero(np.abs(self.T[i, :n]) > self.tol)
            if len(nz):
                self._pivot(i, int(nz[0]), obj)
            else:
                self.redundant.append(i)
        return True, None

    def phase2(self, c):
        n, m = self.n, self.m
        if self.exact:
            cf = np.empty(n + m, dtype=object)
            cf.fill(gmpy2.mpq(0))
        else:
            cf = np.zeros(n + m)
        cf[:n] = c
        cb = cf[self.basis]
        r = cf - cb @ self.T if m else cf
        val = cb @ self.rhs if m else cf[:0].sum()
        obj = [r, val]
        status = self._run(obj, n)
        z = np.zeros(n, dtype=object if self.exact else float)
        if self.exact:
            z.fill(gmpy2.mpq(0))
        for i, bi in enumerate(self.basis):
            if bi < n:
                z[bi] = self.rhs[i]
        y = -obj[0][n:] * self.sign
        return status, z, y, obj[1]


def _out(v, exact):
    if exact:
        return Fraction(int(v.numerator), int(v.denominator))
    return float(v)


def _out_array(vs, exact):
    if exact:
        a = np.empty(len(vs), dtype=object)
        a[:] = [_out(v, True) for v in vs] if len(vs) else []
        return a
    return np.array([float(v) for v in vs], dtype=float)


class FeasibleRegion:
    """The constraint set of ``lp``, pivoted to a feasible basis once.

    ``optimize`` reuses that basis for any objective.  With ``warm=True`` the
    optimal basis of the last solve is kept as the new starting point.
    """

    def __init__(self, lp: LinearProgram, max_iter: int | None = None):
        self.lp = lp
        self.std = _StandardForm(lp)
        ar = lp.arith
        if max_iter is None:
            max_iter = 10 * (self.std.m_std + self.std.n_std) ** 2
        self.max_iter = max_iter
        self._tab = _Tableau(self.std.A, self.std.b, ar.exact, ar.tol, max_iter)
        self.feasible, y = self._tab.phase1()
        self._farkas = None
        if not self.feasible:
            self._farkas = self.std.split_rows(list(y))

    def infeasible_solution(self) -> LPSolution:
        ex = self.lp.arith.exact
        y, w = self._farkas
        return LPSolution(Status.INFEASIBLE, farkas=_out_array(y, ex),
                          farkas_bounds=_out_array(w, ex), iterations=self._tab.iterations)

    def optimize(self, objective=None, sense=None, warm=False) -> LPSolution:
        lp = self.lp
        if objective is None:
            objective = lp.objective
        if sense is None:
            sense = lp.sense
        if len(objective) != lp.n_vars:
            raise ValueError("objective length does not match n_vars")
        if not self.feasible:
            return self.infeasible_solution()
        ex = lp.arith.exact
        tab = self._tab if warm else self._tab.copy()
        tab.iterations = 0
        status, z, y, val = tab.phase2(self.std.cost(objective, sense))
        if status is Status.UNBOUNDED:
            return LPSolution(Status.UNBOUNDED, iterations=tab.iterations)
        sgn = -1 if sense == "max" else 1
        x = _out_array(self.std.x_back(z), ex)
        yr, w = self.std.split_rows(list(y * sgn))
        return LPSolution(Status.OPTIMAL, x=x, duals=_out_array(yr, ex),
                          bound_duals=_out_array(w, ex), objective=_out(val * sgn, ex),
                          iterations=tab.iterations)


def solve(lp: LinearProgram, max_iter: int | None = None) -> LPSolution:
    region = FeasibleRegion(lp, max_iter=max_iter)
    return region.optimize(lp.objective, lp.sense)


def _row_products(lp: LinearProgram, y) -> list:
    """A^T y as a list over variables."""
    ar = lp.arith
    out = [ar.convert(0)] * lp.n_vars
    for r, c, v in lp.entries:
        out[c] = out[c] + ar.convert(v) * y[r]
    return out


def check_optimality(lp: LinearProgram, sol: LPSolution) -> dict:
    """Residuals of an optimal solution: primal, dual, complementarity, gap.

    Every value is zero for exact programs and at most a few tolerances for
    float ones.
    """
    ar = lp.arith
    x, y, w = sol.x, sol.duals, sol.bound_duals
    A = lp.dense()
    ax = A @ x if lp.n_rows else np.array([])
    primal = 0
    for i, s in enumerate(lp.senses):
        d = ax[i] - ar.convert(lp.rhs[i])
        viol = abs(d) if s == "=" else (max(d, 0) if s == "<=" else max(-d, 0))
        primal = max(primal, viol)
    for j in range(lp.n_vars):
        if lp.lower[j] == 0:
            primal = max(primal, max(-x[j], 0))
        if lp.upper[j] != INF:
            primal = max(primal, max(x[j] - ar.convert(lp.upper[j]), 0))
    # orient so that the dual reads: A^T y + w <= c (min) / >= c (max)
    sgn = 1 if lp.sense == "min" else -1
    aty = _row_products(lp, y)
    dual = 0
    compl = 0
    for j in range(lp.n_vars):
        red = sgn * (ar.convert(lp.objective[j]) - aty[j] - w[j])
        dual = max(dual, abs(red) if lp.lower[j] == -INF else max(-red, 0))
        compl = max(compl, abs(red * x[j]))
        if lp.upper[j] != INF:
            dual = max(dual, max(sgn * w[j], 0))
            compl = max(compl, abs(w[j] * (ar.convert(lp.upper[j]) - x[j])))
        elif w[j] != 0:
            dual = max(dual, abs(w[j]))
    for i, s in enumerate(lp.senses):
        if s == "<=":
            dual = max(dual, max(sgn * y[i], 0))
        elif s == ">=":
            dual = max(dual, max(-sgn * y[i], 0))
        if s != "=":
            compl = max(compl, abs(y[i] * (ax[i] - ar.convert(lp.rhs[i]))))
    pobj = sum((ar.convert(c) * xi for c, xi in zip(lp.objective, x)), ar.convert(0))
    dobj = sum((ar.convert(b) * yi for b, yi in zip(lp.rhs, y)), ar.convert(0))
    dobj += sum((ar.convert(lp.upper[j]) * w[j] for j in range(lp.n_vars) if lp.upper[j] != INF),
                ar.convert(0))
    return {"primal": primal, "dual": dual, "complementarity": compl,
            "gap": abs(pobj - dobj), "objective_mismatch": abs(pobj - sol.objective)}


def verify_farkas(lp: LinearProgram, y, w=None) -> bool:
    """True iff ``(y, w)`` proves that ``lp`` has no feasible point.

    Conditions: ``A^T y + w <= 0`` on nonnegative variables and ``== 0`` on
    free ones, sign-compatible multipliers on inequality rows, and
    ``rhs.y + upper.w > 0``.
    """
    ar = lp.arith
    if w is None:
        w = [ar.convert(0)] * lp.n_vars
    aty = _row_products(lp, y)
    for j in range(lp.n_vars):
        if lp.upper[j] == INF and not ar.is_zero(w[j]):
            return False
        if lp.upper[j] != INF and ar.is_pos(w[j]):
            return False
        v = aty[j] + w[j]
        if lp.lower[j] == -INF:
            if not ar.is_zero(v):
                return False
        elif ar.is_pos(v):
            return False
    for i, s in enumerate(lp.senses):
        if s == "<=" and ar.is_pos(y[i]):
            return False
        if s == ">=" and ar.is_neg(y[i]):
            return False
    total = sum((ar.convert(b) * yi for b, yi in zip(lp.rhs, y)), ar.convert(0))
    total += sum((ar.convert(lp.upper[j]) * w[j] for j in range(lp.n_vars) if lp.upper[j] != INF),
                 ar.convert(0))
    return ar.is_pos(total)


def lp_from_dense(A, senses: Sequence[str], rhs, objective=None, sense="min",
                  lower=None, upper=None, arith: Arith | None = None) -> LinearProgram:
    A = np.asarray(A, dtype=object)
    m, n = A.shape if A.ndim == 2 else (0, len(objective or []))
    entries = [(i, j, A[i, j]) for i in range(m) for j in range(n) if A[i, j] != 0]
    return LinearProgram(n, entries, list(senses), list(rhs), objective, sense, lower, upper, arith)
