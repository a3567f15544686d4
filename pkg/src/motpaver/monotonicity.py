"""Competitors and c-martingale-monotonicity of candidate supports.

A competitor of a finite plan keeps both marginals and every conditional
barycenter.  A support set is monotone when no finite plan living on it has
a strictly more expensive competitor; optimizer supports always are (a
competitor swap could otherwise be pushed into the optimizer).
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

import numpy as np

from . import linprog
from ._numeric import Arith, infer_arith
from .linprog import INF, LinearProgram
from .transport import setup, solve_mot


class FinitePlan:
    """A finitely supported probability on R^d x R^d.

    Stored as distinct ``x_points`` and ``y_points`` with a mass matrix
    between them; every x row carries mass, every y column may be empty
    (a wider y-universe for competitors).
    """

    def __init__(self, x_points, y_points, mass, arith: Arith | None = None):
        xs = np.asarray(x_points, dtype=object)
        ys = np.asarray(y_points, dtype=object)
        xs = xs.reshape(len(xs), -1)
        ys = ys.reshape(len(ys), -1)
        mass = np.asarray(mass, dtype=object).reshape(len(xs), len(ys))
        if arith is None:
            arith = infer_arith(xs, ys, mass)
        self.arith = arith
        self.x_points = arith.array(xs)
        self.y_points = arith.array(ys)
        self.mass = arith.array(mass)
        if any(arith.is_neg(v) for v in self.mass.ravel()):
            raise ValueError("negative plan mass")
        if not arith.eq(self.mass.sum(), 1):
            raise ValueError(f"plan mass sums to {self.mass.sum()}, not 1")
        if len({tuple(x) for x in self.x_points}) != len(self.x_points):
            raise ValueError("repeated x point")
        if len({tuple(y) for y in self.y_points}) != len(self.y_points):
            raise ValueError("repeated y point")

    @property
    def shape(self):
        return self.mass.shape

    def pairs(self) -> list[tuple[int, int]]:
        a, b = self.shape
        return [(i, j) for i in range(a) for j in range(b) if self.arith.is_pos(self.mass[i, j])]

    def x_marginal(self):
        return self.mass.sum(axis=1)

    def y_marginal(self):
        return self.mass.sum(axis=0)

    def barycenters(self):
        """Row-wise ``sum_j mass_ij y_j`` (unnormalized conditional means)."""
        return self.mass @ self.y_points

    def value(self, cost):
        return (self.mass * cost).sum()

    def __repr__(self) -> str:
        return f"FinitePlan({self.shape[0]}x{self.shape[1]}, {len(self.pairs())} pairs)"


def _cost_on(plan: FinitePlan, cost, ys) -> np.ndarray:
    ar = plan.arith
    if callable(cost):
        vals = [[cost(x, y) for y in ys] for x in plan.x_points]
        return ar.array(vals)
    arr = np.asarray(cost, dtype=object)
    if arr.shape != (len(plan.x_points), len(ys)):
        raise ValueError(f"cost shape {arr.shape} does not match plan x universe")
    return ar.array(arr)


def _embed(plan: FinitePlan, ys):
    """Plan mass re-indexed over the y-universe ``ys``."""
    ar = plan.arith
    index = {tuple(y): k for k, y in enumerate(ys)}
    mass = ar.zeros((plan.shape[0], len(ys)))
    for j, y in enumerate(plan.y_points):
        if tuple(y) not in index:
            if any(ar.is_pos(v) for v in plan.mass[:, j]):
                raise ValueError("y universe misses a charged plan atom")
            continue
        mass[:, index[tuple(y)]] = plan.mass[:, j]
    return mass


def competitor_lp(plan: FinitePlan, cost_matrix, ys) -> LinearProgram:
    ar = plan.arith
    base = _embed(plan, ys)
    a, b, d = base.shape[0], len(ys), plan.x_points.shape[1]
    entries = []
    for i in range(a):
        for j in range(b):
            k = i * b + j
            entries.append((i, k, 1))
            entries.append((a + j, k, 1))
            for r in range(d):
                if ys[j][r] != 0:
                    entries.append((a + b + i * d + r, k, ys[j][r]))
    bary = base @ ys
    rhs = list(base.sum(axis=1)) + list(base.sum(axis=0)) + [bary[i, r] for i in range(a) for r in range(d)]
    return LinearProgram(a * b, entries, ["="] * len(rhs), rhs, list(cost_matrix.ravel()),
                         "max", arith=ar)


def competitor_max(plan: FinitePlan, cost, y_universe=None):
    """Most expensive competitor of ``plan``.

    ``cost`` is a callable ``c(x, y)`` or a matrix over (plan x points, y
    universe).  The universe defaults to the plan's own y points; equal
    Y-marginals already forbid anything else, so a wider universe only
    matters for exploration.  Returns ``(value, competitor plan)``.
    """
    ys = plan.y_points if y_universe is None else plan.arith.array(
        np.asarray(y_universe, dtype=object).reshape(-1, plan.y_points.shape[1]))
    cm = _cost_on(plan, cost, ys)
    sol = linprog.solve(competitor_lp(plan, cm, ys))
    if not sol.optimal:
        raise RuntimeError(f"competitor LP returned {sol.status}")
    comp = FinitePlan(plan.x_points, ys, sol.x.reshape(len(plan.x_points), len(ys)), plan.arith)
    return sol.objective, comp


def is_competitor(plan: FinitePlan, other: FinitePlan) -> bool:
    """Same X-marginal, Y-marginal and conditional barycenters."""
    ar = plan.arith.join(other.arith)
    if len(plan.x_points) != len(other.x_points):
        return False
    if not all(tuple(a) == tuple(b) for a, b in zip(plan.x_points, other.x_points)):
        return False
    ys = list({tuple(y): y for y in list(plan.y_points) + list(other.y_points)}.values())
    ys = ar.array(ys)
    p, q = _embed(plan, ys), _embed(other, ys)
    checks = list(p.sum(axis=1) - q.sum(axis=1)) + list(p.sum(axis=0) - q.sum(axis=0))
    checks += list((p @ ys - q @ ys).ravel())
    return all(ar.is_zero(v) for v in checks)


@dataclass
class Witness:
    plan: FinitePlan
    competitor: FinitePlan
    gap: object
    rows: list[int]  # mu-atom indices of the plan rows
    cols: list[int]  # nu-atom indices of the plan columns

    def verify(self, cost_matrix, tol_scale=1) -> bool:
        ar = self.plan.arith
        gap = self.competitor.value(cost_matrix) - self.plan.value(cost_matrix)
        return is_competitor(self.plan, self.competitor) and ar.is_pos(gap) and ar.eq(gap, self.gap)


@dataclass
class MonotonicityCertificate:
    verdict: str  # "certified" | "violated"
    trials: int
    witness: Witness | None = None
    params: dict = field(default_factory=dict)

    @property
    def certified(self) -> bool:
        return self.verdict == "certified"


def _improves(ar: Arith, gap, base) -> bool:
    if ar.exact:
        return gap > 0
    return gap > ar.tol * (1 + abs(base))


def _plan_from_rows(mu, nu, rows, gamma_rows, weights, ar):
    cols = sorted({j for i in rows for j in gamma_rows[i]})
    mass = ar.zeros((len(rows), len(cols)))
    for a, i in enumerate(rows):
        for j in gamma_rows[i]:
            mass[a, cols.index(j)] = weights[(i, j)]
    total = mass.sum()
    return FinitePlan(mu.atoms[rows], nu.atoms[cols], mass / total, ar), cols


def certify_support(gamma, mu, nu, c, budget: int = 200, max_x: int = 4, seed: int = 0,
                    weights: dict | None = None) -> MonotonicityCertificate:
    """Search finite plans on ``gamma`` for a strictly improving competitor.

    Every one- and two-atom selection of x rows (with their full gamma rows)
    is tried, then ``budget`` random plans with up to ``max_x`` rows, random
    sub-rows and random rational weights.  ``weights`` fixes the masses of
    the exhaustive plans (uniform by default).
    """
    mu, nu, cost, ar = setup(mu, nu, c)
    gamma = {tuple(q) for q in gamma}
    if not gamma:
        raise ValueError("empty support")
    rows_of: dict[int, list[int]] = {}
    for i, j in sorted(gamma):
        rows_of.setdefault(i, []).append(j)
    xs = sorted(rows_of)
    params = {"budget": budget, "max_x": max_x, "seed": seed}
    trials = 0

    def attempt(rows, gamma_rows, w):
        nonlocal trials
        trials += 1
        plan, cols = _plan_from_rows(mu, nu, rows, gamma_rows, w, ar)
        sub = cost[np.ix_(rows, cols)]
        base = plan.value(sub)
        val, comp = competitor_max(plan, sub)
        if _improves(ar, val - base, base):
            return Witness(plan, comp, val - base, list(rows), cols)
        return None

    w0 = weights or {q: ar.convert(1) for q in gamma}
    for size in (1, 2):
        for rows in itertools.combinations(xs, size):
            wit = attempt(list(rows), rows_of, w0)
            if wit:
                return MonotonicityCertificate("violated", trials, wit, params)

    rng = random.Random(seed)
    for _ in range(budget):
        k = rng.randint(1, min(max_x, len(xs)))
        rows = sorted(rng.sample(xs, k))
        sub_rows = {i: sorted(rng.sample(rows_of[i], rng.randint(1, len(rows_of[i])))) for i in rows}
        w = {(i, j): ar.convert(rng.randint(1, 9)) for i in rows for j in sub_rows[i]}
        wit = attempt(rows, sub_rows, w)
        if wit:
            return MonotonicityCertificate("violated", trials, wit, params)
    return MonotonicityCertificate("certified", trials, None, params)


@dataclass
class ConcentrationReport:
    value: object
    gamma: set  # zero-slack pairs of the dual certificate
    optimizer_concentrated: bool
    face_min: object  # min / max of P[c] over couplings supported on gamma
    face_max: object
    couplings: dict  # name -> {"concentrated", "value", "optimal"}

    @property
    def holds(self) -> bool:
        """Optimal exactly when concentrated, for the optimizer and every supplied coupling."""
        return self.optimizer_concentrated and all(
            r["concentrated"] == r["optimal"] for r in self.couplings.values())


def optimality_iff_concentrated(mu, nu, c, couplings: dict | None = None) -> ConcentrationReport:
    """Zero-slack set of the dual certificate against optimality of couplings."""
    mu, nu, cost, ar = setup(mu, nu, c)
    res = solve_mot(mu, nu, cost)
    s = res.certificate.slack
    m, n = len(mu), len(nu)
    gamma = {(i, j) for i in range(m) for j in range(n) if ar.is_zero(s[i, j])}
    conc = res.coupling.support() <= gamma
    from .transport import assemble
    lp = assemble(mu, nu, list(cost.ravel()), "max")
    lp.upper = [INF if (k // n, k % n) in gamma else 0 for k in range(m * n)]
    region = linprog.FeasibleRegion(lp)
    hi = region.optimize(lp.objective, "max").objective
    lo = region.optimize(lp.objective, "min").objective
    rep = {}
    for name, cp in (couplings or {}).items():
        v = cp.value(cost)
        rep[name] = {"concentrated": cp.support() <= gamma, "value": v,
                     "optimal": ar.eq(v, res.value), "feasible": cp.is_feasible()}
    return ConcentrationReport(res.value, gamma, conc, lo, hi, rep)


def weakly_convex_check_1d(values, paving) -> list[bool]:
    """Per component: are ``values`` (one per nu-atom) convex along its J atoms?

    Checked through nondecreasing difference quotients of the attached
    atoms sorted by coordinate.
    """
    nu = paving.nu
    if nu.d != 1:
        raise ValueError("weak convexity by difference quotients needs d == 1")
    ar = paving.arith
    out = []
    for comp in paving.components:
        js = sorted(comp.j_atoms, key=lambda j: nu.atoms[j][0])
        ok = True
        prev = None
        for a, b in zip(js, js[1:]):
            q = (values[b] - values[a]) / (nu.atoms[b][0] - nu.atoms[a][0])
            if prev is not None and ar.is_neg(q - prev):
                ok = False
                break
            prev = q
        out.append(ok)
    return out
