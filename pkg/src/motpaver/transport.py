"""Martingale transport between two discrete measures: primal and dual.

The coupling LP has one variable per atom pair ``(i, j)`` (index
``i * len(nu) + j``) and three row blocks, in this order:

* ``len(mu)`` X-marginal rows, multiplier ``phi_i``;
* ``len(nu)`` Y-marginal rows, multiplier ``psi_j``;
* ``d * len(mu)`` martingale rows ``sum_j p_ij (y_j - x_i) = 0``, multiplier ``h_i``.

With this layout the LP dual of ``max P[c]`` is literally the superhedging
problem: ``phi_i + psi_j + h_i.(y_j - x_i) >= c_ij``.  Dual triples are only
determined up to the gauge ``phi + a, psi - a`` (and shifts of ``h`` along
directions the coupling never uses); one representative is reported.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linprog
from ._numeric import fmt, infer_arith
from .linprog import LinearProgram
from .measures import DiscreteMeasure, OrderCertificate, common_arith, convex_order_check


class NotInConvexOrder(ValueError):
    """No martingale coupling exists; ``certificate`` holds the separation."""

    def __init__(self, certificate: OrderCertificate):
        super().__init__("mu is not dominated by nu in convex order")
        self.certificate = certificate


@dataclass
class CostMatrix:
    values: np.ndarray
    nonnegative: bool = False

    def __post_init__(self):
        if any(isinstance(v, float) and not np.isfinite(v) for v in np.ravel(self.values)):
            raise ValueError("infinite or NaN cost entry")
        if self.nonnegative and any(v < 0 for v in np.ravel(self.values)):
            raise ValueError("cost flagged nonnegative has a negative entry")


def cost_from_function(f, mu: DiscreteMeasure, nu: DiscreteMeasure) -> np.ndarray:
    """Evaluate ``f(x, y)`` on every atom pair."""
    vals = [[f(x, y) for y in nu.atoms] for x in mu.atoms]
    return np.array(vals, dtype=object if mu.arith.exact and nu.arith.exact else float)


def _cost_values(c, mu, nu):
    if isinstance(c, CostMatrix):
        c = c.values
    if callable(c):
        c = cost_from_function(c, mu, nu)
    arr = np.asarray(c, dtype=object)
    if arr.ndim == 0:
        arr = np.full((len(mu), len(nu)), arr.item(), dtype=object)
    if arr.shape != (len(mu), len(nu)):
        raise ValueError(f"cost has shape {arr.shape}, expected {(len(mu), len(nu))}")
    for v in arr.ravel():
        if isinstance(v, float) and not np.isfinite(v):
            raise ValueError("infinite or NaN cost entry")
    return arr


def setup(mu, nu, c=None):
    """Common arithmetic for (mu, nu, c); returns converted copies.

    A missing cost is the zero matrix.
    """
    mu, nu, ar = common_arith(mu, nu)
    if c is None:
        return mu, nu, ar.zeros((len(mu), len(nu))), ar
    raw = _cost_values(c, mu, nu)
    ar = ar.join(infer_arith(raw, tol=ar.tol))
    mu, nu = mu.with_arith(ar), nu.with_arith(ar)
    cost = ar.array(raw if ar.exact else raw.astype(float))
    return mu, nu, cost, ar


class Coupling:
    """A mass matrix ``p[i, j]`` on atoms of (mu, nu)."""

    def __init__(self, mu: DiscreteMeasure, nu: DiscreteMeasure, p):
        self.mu, self.nu = mu, nu
        self.arith = mu.arith.join(nu.arith)
        self.p = self.arith.array(np.asarray(p, dtype=object).reshape(len(mu), len(nu)))

    def __repr__(self) -> str:
        return f"Coupling({len(self.mu)}x{len(self.nu)}, support={len(self.support())})"

    def support(self) -> set[tuple[int, int]]:
        ar = self.arith
        return {(i, j) for i in range(len(self.mu)) for j in range(len(self.nu))
                if ar.is_pos(self.p[i, j])}

    def row_support(self, i) -> list[int]:
        return [j for j in range(len(self.nu)) if self.arith.is_pos(self.p[i, j])]

    def value(self, c):
        cost = setup(self.mu, self.nu, c)[2]
        return (self.p * cost).sum()

    def violations(self) -> list[str]:
        """Every broken coupling invariant, as a readable message."""
        ar, p = self.arith, self.p
        mu, nu = self.mu, self.nu
        out = []
        for (i, j), v in np.ndenumerate(p):
            if ar.is_neg(v):
                out.append(f"negative mass {fmt(v)} at ({i}, {j})")
        for i in range(len(mu)):
            if not ar.eq(p[i].sum(), mu.weights[i]):
                out.append(f"X-marginal at atom {i}: {fmt(p[i].sum())} != {fmt(mu.weights[i])}")
            bary = p[i] @ nu.atoms
            target = mu.weights[i] * mu.atoms[i]
            if not all(ar.eq(a, b) for a, b in zip(bary, target)):
                out.append(f"martingale at atom {i}: barycenter mass ({', '.join(map(fmt, bary))})"
                           f" != ({', '.join(map(fmt, target))})")
        for j in range(len(nu)):
            if not ar.eq(p[:, j].sum(), nu.weights[j]):
                out.append(f"Y-marginal at atom {j}: {fmt(p[:, j].sum())} != {fmt(nu.weights[j])}")
        return out

    def is_feasible(self) -> bool:
        return not self.violations()


def assemble(mu: DiscreteMeasure, nu: DiscreteMeasure, objective=None, sense="max") -> LinearProgram:
    """Constraint LP of the martingale transport polytope M(mu, nu)."""
    mu, nu, ar = common_arith(mu, nu)
    m, n, d = len(mu), len(nu), mu.d
    entries = []
    for i in range(m):
        for j in range(n):
            k = i * n + j
            entries.append((i, k, 1))
            entries.append((m + j, k, 1))
            diff = nu.atoms[j] - mu.atoms[i]
            for r in range(d):
                if diff[r] != 0:
                    entries.append((m + n + i * d + r, k, diff[r]))
    rhs = list(mu.weights) + list(nu.weights) + [0] * (m * d)
    senses = ["="] * len(rhs)
    if objective is None:
        objective = [0] * (m * n)
    return LinearProgram(m * n, entries, senses, rhs, list(objective), sense, arith=ar)


def split_multipliers(y, m: int, n: int, d: int):
    """Row multipliers of :func:`assemble` as (phi, psi, h)."""
    y = np.asarray(y, dtype=object)
    phi = y[:m]
    psi = y[m:m + n]
    h = y[m + n:].reshape(m, d)
    if all(isinstance(v, float) for v in y):
        return phi.astype(float), psi.astype(float), h.astype(float)
    return phi, psi, h


@dataclass
class Violation:
    i: int
    j: int
    slack: object


@dataclass
class DualCertificate:
    """Superhedging triple with slack ``phi_i + psi_j + h_i.(y_j - x_i) - c_ij``."""

    mu: DiscreteMeasure
    nu: DiscreteMeasure
    phi: np.ndarray
    psi: np.ndarray
    h: np.ndarray
    cost: np.ndarray
    scope: set | None = None
    slack: np.ndarray = field(init=False)

    def __post_init__(self):
        self.slack = slacks(self.mu, self.nu, self.phi, self.psi, self.h, self.cost)

    @property
    def value(self):
        return self.mu.integrate(self.phi) + self.nu.integrate(self.psi)


def slacks(mu, nu, phi, psi, h, cost) -> np.ndarray:
    ar = mu.arith.join(nu.arith)
    s = ar.zeros((len(mu), len(nu)))
    for i in range(len(mu)):
        for j in range(len(nu)):
            s[i, j] = phi[i] + psi[j] + h[i] @ (nu.atoms[j] - mu.atoms[i]) - cost[i, j]
    return s


def verify_certificate(cert: DualCertificate, c=None, scope=None) -> list[Violation]:
    """Pairs on ``scope`` where the superhedging inequality fails.

    ``scope`` is an iterable of ``(i, j)`` pairs; by default the certificate's
    own scope, or every pair.  ``c`` overrides the cost stored on ``cert``.
    """
    mu, nu = cert.mu, cert.nu
    ar = mu.arith.join(nu.arith)
    if c is None:
        s = cert.slack
    else:
        cost = setup(mu, nu, c)[2]
        s = slacks(mu, nu, cert.phi, cert.psi, cert.h, cost)
    if scope is None:
        scope = cert.scope
    if scope is None:
        scope = [(i, j) for i in range(len(mu)) for j in range(len(nu))]
    return [Violation(i, j, s[i, j]) for i, j in sorted(scope) if ar.is_neg(s[i, j])]


@dataclass
class MOTSolution:
    coupling: Coupling
    value: object
    certificate: DualCertificate
    lp: LinearProgram
    lp_solution: linprog.LPSolution

    @property
    def gap(self):
        return self.certificate.value - self.value


def solve_mot(mu: DiscreteMeasure, nu: DiscreteMeasure, c, sense: str = "max") -> MOTSolution:
    """Solve ``sup P[c]`` over M(mu, nu) together with its superhedging dual.

    ``sense="min"`` gives the subhedging problem; its certificate then
    satisfies the reversed inequality, so it is returned for ``-c`` instead.
    """
    mu, nu, cost, ar = setup(mu, nu, c)
    m, n = len(mu), len(nu)
    sgn = 1 if sense == "max" else -1
    lp = assemble(mu, nu, [sgn * v for v in cost.ravel()], "max")
    sol = linprog.solve(lp)
    if not sol.optimal:
        if sol.status is linprog.Status.INFEASIBLE:
            raise NotInConvexOrder(convex_order_check(mu, nu))
        raise RuntimeError(f"unexpected LP status {sol.status}")
    coupling = Coupling(mu, nu, sol.x.reshape(m, n))
    phi, psi, h = split_multipliers(sol.duals, m, n, mu.d)
    cert = DualCertificate(mu, nu, phi, psi, h, sgn * cost)
    return MOTSolution(coupling, sgn * sol.objective, cert, lp, sol)


def solve_primal(mu, nu, c):
    """``(optimal coupling, S_{mu,nu}(c))``."""
    res = solve_mot(mu, nu, c)
    return res.coupling, res.value


def extract_dual(mu, nu, c) -> DualCertificate:
    return solve_mot(mu, nu, c).certificate
