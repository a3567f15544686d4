"""Splitting a martingale transport problem along its irreducible paving.

Given a coupling ``P``, component ``k`` carries ``mu_k = mu(. | X in I_k)``
and ``nu_k = P(Y in . | X in I_k)`` with weight ``eta_k = mu(I_k)``.  At an
optimizer the global value is the eta-weighted sum of the componentwise
values, and each component has its own superhedging certificate.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linprog
from ._numeric import Arith
from .linprog import INF, LinearProgram
from .measures import DiscreteMeasure
from .paving import ComponentPaving, compute_paving
from .transport import Coupling, DualCertificate, setup, solve_mot, verify_certificate


@dataclass
class ComponentProblem:
    component: int
    members: list[int]  # mu-atom indices in the parent problem
    targets: list[int]  # nu-atom indices charged from this component
    mu_I: DiscreteMeasure
    nu_I: DiscreteMeasure
    coupling: Coupling  # renormalized restriction, indexed by (members, targets)
    cost: np.ndarray | None
    eta: object


def disintegrate(paving: ComponentPaving, coupling: Coupling, c=None) -> list[ComponentProblem]:
    mu, nu = paving.mu, paving.nu
    ar = paving.arith
    p = coupling.p
    cost = setup(mu, nu, c)[2] if c is not None else None
    problems = []
    for comp in paving.components:
        rows = comp.members
        eta = comp.eta
        mass = p[rows].sum(axis=0)
        targets = [j for j in range(len(nu)) if ar.is_pos(mass[j])]
        mu_I = DiscreteMeasure(mu.atoms[rows], [mu.weights[i] / eta for i in rows], ar)
        nu_I = DiscreteMeasure(nu.atoms[targets], [mass[j] / eta for j in targets], ar)
        sub = p[np.ix_(rows, targets)] / eta
        sub_cost = cost[np.ix_(rows, targets)] if cost is not None else None
        problems.append(ComponentProblem(comp.id, list(rows), targets, mu_I, nu_I,
                                         Coupling(mu_I, nu_I, sub), sub_cost, eta))
    return problems


def mixture_residual(problems: list[ComponentProblem], mu: DiscreteMeasure,
                     nu: DiscreteMeasure) -> tuple[list, list]:
    """``sum_k eta_k mu_k - mu`` and ``sum_k eta_k nu_k - nu`` per atom."""
    ar = mu.arith.join(nu.arith)
    dm = list(-mu.weights)
    dn = list(-nu.weights)
    for pb in problems:
        for a, i in enumerate(pb.members):
            dm[i] += pb.eta * pb.mu_I.weights[a]
        for b, j in enumerate(pb.targets):
            dn[j] += pb.eta * pb.nu_I.weights[b]
    return [ar.convert(v) for v in dm], [ar.convert(v) for v in dn]


@dataclass
class DecompositionReport:
    value: object  # S_{mu,nu}(c)
    weighted_sum: object  # sum_k eta_k S_{mu_k,nu_k}(c)
    components: list[dict]
    holds: bool
    coupling: Coupling = field(repr=False)
    paving: ComponentPaving = field(repr=False)
    problems: list[ComponentProblem] = field(repr=False)


def check_decomposition(mu, nu, c, paving: ComponentPaving | None = None) -> DecompositionReport:
    """Compare the global value with the eta-weighted componentwise values at an optimizer."""
    mu, nu, cost, ar = setup(mu, nu, c)
    glob = solve_mot(mu, nu, cost)
    if paving is None:
        paving = compute_paving(mu, nu)
    problems = disintegrate(paving, glob.coupling, cost)
    rows, total = [], ar.convert(0)
    for pb in problems:
        v = solve_mot(pb.mu_I, pb.nu_I, pb.cost).value
        total += pb.eta * v
        rows.append({"component": pb.component, "eta": pb.eta, "value": v})
    return DecompositionReport(glob.value, total, rows, ar.eq(total, glob.value),
                               glob.coupling, paving, problems)


def convex_extendable(points, values, arith: Arith | None = None):
    """Do values on points extend to a convex function?

    Feasibility of ``v_l >= v_j + g_j.(y_l - y_j)`` for all pairs, with a free
    subgradient ``g_j`` per point.  Returns ``(ok, subgradients or None)``.
    """
    pts = np.asarray(points, dtype=object)
    if pts.ndim == 1:
        pts = pts.reshape(-1, 1)
    k, d = pts.shape
    entries, rhs = [], []
    row = 0
    for j in range(k):
        for l in range(k):
            if l == j:
                continue
            for r in range(d):
                diff = pts[l, r] - pts[j, r]
                if diff != 0:
                    entries.append((row, j * d + r, diff))
            rhs.append(values[l] - values[j])
            row += 1
    n = k * d
    lp = LinearProgram(n, entries, ["<="] * len(rhs), rhs, [0] * n, "min",
                       [-INF] * n, [INF] * n, arith)
    sol = linprog.solve(lp)
    if not sol.optimal:
        return False, None
    return True, sol.x.reshape(k, d)


@dataclass
class ComponentDual:
    problem: ComponentProblem
    certificate: DualCertificate
    value: object
    gap: object
    violations: list
    convex_psi: bool

    @property
    def scope(self) -> set:
        """Parent-indexed (member, target) pairs the certificate covers."""
        return {(i, j) for i in self.problem.members for j in self.problem.targets}


def componentwise_dual(mu, nu, c, paving: ComponentPaving | None = None) -> list[ComponentDual]:
    """Superhedging certificate of each component problem at the optimizer.

    Each certificate is admissible on its members x charged targets, with
    zero gap against the componentwise primal value.
    """
    report = check_decomposition(mu, nu, c, paving)
    out = []
    for pb in report.problems:
        sol = solve_mot(pb.mu_I, pb.nu_I, pb.cost)
        cert = sol.certificate
        ok, _ = convex_extendable(pb.nu_I.atoms, cert.psi, pb.nu_I.arith)
        out.append(ComponentDual(pb, cert, sol.value, cert.value - sol.value,
                                 verify_certificate(cert), ok))
    return out


@dataclass
class GluedCertificate:
    phi: np.ndarray
    psi: np.ndarray
    h: np.ndarray
    slack: np.ndarray
    scope: set

    def violations(self, arith, on_scope: bool | None = None) -> list[tuple[int, int]]:
        """Negative-slack pairs; restrict to the scope (True) or its complement (False)."""
        m, n = self.slack.shape
        cells = [(i, j) for i in range(m) for j in range(n)]
        if on_scope is True:
            cells = [q for q in cells if q in self.scope]
        elif on_scope is False:
            cells = [q for q in cells if q not in self.scope]
        return [q for q in cells if arith.is_neg(self.slack[q])]


def glue(duals: list[ComponentDual], mu, nu, c) -> GluedCertificate:
    """One global triple from componentwise ones.

    Shared atoms take the largest component psi, which can only raise slacks
    on every component scope.
    """
    mu, nu, cost, ar = setup(mu, nu, c)
    phi = ar.zeros(len(mu))
    h = ar.zeros((len(mu), mu.d))
    psi = [None] * len(nu)
    scope = set()
    for cd in duals:
        pb, cert = cd.problem, cd.certificate
        for a, i in enumerate(pb.members):
            phi[i] = cert.phi[a]
            h[i] = cert.h[a]
        for b, j in enumerate(pb.targets):
            psi[j] = cert.psi[b] if psi[j] is None else max(psi[j], cert.psi[b])
        scope |= cd.scope
    psi = ar.array([ar.convert(0) if v is None else v for v in psi])
    slack = ar.zeros((len(mu), len(nu)))
    for i in range(len(mu)):
        for j in range(len(nu)):
            slack[i, j] = phi[i] + psi[j] + h[i] @ (nu.atoms[j] - mu.atoms[i]) - cost[i, j]
    return GluedCertificate(phi, psi, h, slack, scope)


def sub_paving(problem: ComponentProblem, **kw) -> ComponentPaving:
    """Paving of (mu_I, nu_I); a component problem need not be irreducible."""
    return compute_paving(problem.mu_I, problem.nu_I, **kw)
