"""Irreducible convex paving of a pair of discrete measures in convex order.

For each mu-atom ``x_i`` the component is ``I(x_i) = ri conv{y_j : (i, j)
charged by some martingale coupling}``.  Atoms with equal hulls form one
component; the theory says distinct hulls have disjoint relative interiors,
and :func:`compute_paving` checks that instead of assuming it.
"""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import linprog
from .geometry import Polytope, closure_contains, hull_equal, ri_contains, ri_intersects
from .measures import DiscreteMeasure, common_arith, convex_order_check
from .transport import Coupling, NotInConvexOrder, assemble


class PartitionViolation(RuntimeError):
    pass


def _solve_chunk(lp, objectives, sense):
    region = linprog.FeasibleRegion(lp)
    out = []
    for obj in objectives:
        sol = region.optimize(obj, sense, warm=True)
        out.append((sol.objective, sol.x))
    return out


class CouplingRegion:
    """M(mu, nu) pivoted to a feasible basis, reused for many linear objectives."""

    def __init__(self, mu: DiscreteMeasure, nu: DiscreteMeasure, jobs: int = 1):
        self.mu, self.nu, self.arith = common_arith(mu, nu)
        self.lp = assemble(self.mu, self.nu)
        self.region = linprog.FeasibleRegion(self.lp)
        self.jobs = jobs
        self.solves = 0

    @property
    def feasible(self) -> bool:
        return self.region.feasible

    def _objective(self, cells):
        n = len(self.nu)
        c = [0] * self.lp.n_vars
        for i, j in cells:
            c[i * n + j] = 1
        return c

    def optimize(self, cells, sense="max"):
        """Optimal value and mass matrix for ``sum of p over cells``."""
        sol = self.region.optimize(self._objective(cells), sense, warm=True)
        self.solves += 1
        return sol.objective, sol.x.reshape(len(self.mu), len(self.nu))

    def optimize_many(self, cell_sets, sense="max"):
        objectives = [self._objective(cells) for cells in cell_sets]
        self.solves += len(objectives)
        jobs = min(self.jobs, len(objectives))
        if jobs <= 1:
            res = [self.region.optimize(o, sense, warm=True) for o in objectives]
            pairs = [(s.objective, s.x) for s in res]
        else:
            chunks = [objectives[k::jobs] for k in range(jobs)]
            with ProcessPoolExecutor(jobs) as pool:
                parts = list(pool.map(_solve_chunk, [self.lp] * jobs, chunks, [sense] * jobs))
            pairs = [None] * len(objectives)
            for k, part in enumerate(parts):
                for t, r in enumerate(part):
                    pairs[k + t * jobs] = r
        shape = (len(self.mu), len(self.nu))
        return [(v, x.reshape(shape)) for v, x in pairs]


@dataclass
class FeasibleSupport:
    """Pairs charged by at least one martingale coupling, with their maximal masses."""

    mu: DiscreteMeasure
    nu: DiscreteMeasure
    pairs: set
    max_mass: dict
    witness: Coupling

    def targets(self, i) -> list[int]:
        return sorted(j for (a, j) in self.pairs if a == i)

    def __contains__(self, pair) -> bool:
        return tuple(pair) in self.pairs


def _region(mu, nu, region, jobs=1) -> CouplingRegion:
    if region is None:
        region = CouplingRegion(mu, nu, jobs)
    if not region.feasible:
        raise NotInConvexOrder(convex_order_check(region.mu, region.nu))
    return region


def feasible_support(mu, nu, region: CouplingRegion | None = None, jobs: int = 1) -> FeasibleSupport:
    """Support of the maximal martingale coupling, by linear programming.

    Sweeps ``max sum_{unseen pairs} p`` until it returns 0, which certifies
    every remaining pair as null under all couplings; then maximizes each
    charged pair on its own.
    """
    region = _region(mu, nu, region, jobs)
    mu, nu, ar = region.mu, region.nu, region.arith
    m, n = len(mu), len(nu)
    pairs: set = set()
    unseen = {(i, j) for i in range(m) for j in range(n)}
    while unseen:
        val, p = region.optimize(sorted(unseen))
        if not ar.is_pos(val):
            break
        hit = {(i, j) for (i, j) in unseen if ar.is_pos(p[i, j])}
        pairs |= hit
        unseen -= hit
    order = sorted(pairs)
    results = region.optimize_many([[c] for c in order])
    max_mass = {}
    acc = ar.zeros((m, n))
    for cell, (val, p) in zip(order, results):
        max_mass[cell] = val
        acc = acc + p
    witness = Coupling(mu, nu, acc / len(order)) if order else None
    return FeasibleSupport(mu, nu, pairs, max_mass, witness)


@dataclass
class Component:
    id: int
    members: list[int]
    polytope: Polytope
    eta: object
    j_atoms: list[int] = field(default_factory=list)
    j_mass: dict = field(default_factory=dict)  # nu-atom -> (min mass, max mass)
    nu_invariant: bool | None = None

    @property
    def dim(self) -> int:
        return self.polytope.dim

    def vertices(self) -> np.ndarray:
        return self.polytope.vertices

    def boundary_atoms(self, nu) -> list[int]:
        """Attached atoms on the relative boundary (cl I minus I)."""
        return [j for j in self.j_atoms if not ri_contains(self.polytope, nu.atoms[j])]

    def sure_atoms(self, arith) -> list[int]:
        """Attached atoms charged by every coupling (positive minimal mass)."""
        return [j for j in self.j_atoms if arith.is_pos(self.j_mass[j][0])]


@dataclass
class ComponentPaving:
    mu: DiscreteMeasure
    nu: DiscreteMeasure
    components: list[Component]
    atom_component: list[int]
    support: FeasibleSupport
    region: CouplingRegion | None = field(default=None, repr=False)

    def __len__(self) -> int:
        return len(self.components)

    def component_of(self, i) -> Component:
        return self.components[self.atom_component[i]]

    @property
    def arith(self):
        return self.mu.arith.join(self.nu.arith)

    def scope(self, k=None) -> set:
        """Member x J pairs, for one component or the union over all."""
        ks = range(len(self.components)) if k is None else [k]
        return {(i, j) for c in (self.components[t] for t in ks)
                for i in c.members for j in c.j_atoms}


def compute_paving(mu, nu, support: FeasibleSupport | None = None, attach: bool = True,
                   jobs: int = 1) -> ComponentPaving:
    """Group mu-atoms by the convex hull of their feasible targets."""
    region = None
    if support is None:
        region = _region(mu, nu, None, jobs)
        support = feasible_support(mu, nu, region)
    mu, nu = support.mu, support.nu
    ar = mu.arith.join(nu.arith)
    comps: list[Component] = []
    atom_comp = []
    for i in range(len(mu)):
        P = Polytope(nu.atoms[support.targets(i)], ar)
        for c in comps:
            if hull_equal(c.polytope, P):
                c.members.append(i)
                c.eta = c.eta + mu.weights[i]
                atom_comp.append(c.id)
                break
        else:
            comps.append(Component(len(comps), [i], P, mu.weights[i]))
            atom_comp.append(len(comps) - 1)
    for c in comps:
        for i in c.members:
            if not ri_contains(c.polytope, mu.atoms[i]):
                raise PartitionViolation(f"atom {i} is not in the relative interior of its component")
    for a in range(len(comps)):
        for b in range(a + 1, len(comps)):
            if ri_intersects(comps[a].polytope, comps[b].polytope):
                raise PartitionViolation(f"components {a} and {b} overlap")
    paving = ComponentPaving(mu, nu, comps, atom_comp, support, region)
    if attach:
        attach_J(paving, jobs=jobs)
    return paving


def attach_J(paving: ComponentPaving, jobs: int = 1) -> ComponentPaving:
    """Fill ``j_atoms`` and the (min, max) component-to-atom mass annotations.

    Atom ``j`` joins component ``k`` when ``y_j`` lies in cl I_k and some
    coupling sends positive mass from the members of ``k`` to it.
    """
    mu, nu = paving.mu, paving.nu
    ar = paving.arith
    if paving.region is None:
        paving.region = _region(mu, nu, None, jobs)
    region = paving.region
    for comp in paving.components:
        cand = [j for j in range(len(nu)) if closure_contains(comp.polytope, nu.atoms[j])]
        cells = [[(i, j) for i in comp.members] for j in cand]
        hi = region.optimize_many(cells, "max")
        lo = region.optimize_many(cells, "min")
        comp.j_mass = {j: (l[0], h[0]) for j, l, h in zip(cand, lo, hi)}
        comp.j_atoms = [j for j in cand if ar.is_pos(comp.j_mass[j][1])]
    return paving


def nu_invariance(paving: ComponentPaving) -> list[bool]:
    """Per component: is the mass it sends to every nu-atom the same under all couplings?

    Atoms outside cl I_k never receive mass from component ``k``, so only
    the attachment candidates need comparing.
    """
    if not all(c.j_mass for c in paving.components):
        attach_J(paving)
    ar = paving.arith
    out = []
    for comp in paving.components:
        comp.nu_invariant = all(ar.eq(lo, hi) for lo, hi in comp.j_mass.values())
        out.append(comp.nu_invariant)
    return out


def check_support_containment(paving: ComponentPaving, coupling: Coupling) -> list[str]:
    """Where a coupling escapes cl I(x_i) or its conditional hull leaves I(x_i)."""
    out = []
    for i in range(len(paving.mu)):
        comp = paving.component_of(i)
        row = coupling.row_support(i)
        for j in row:
            if not closure_contains(comp.polytope, paving.nu.atoms[j]):
                out.append(f"mass at ({i}, {j}) outside cl I(x_{i})")
        if row:
            inner = Polytope(paving.nu.atoms[row], paving.arith)
            if not ri_contains(comp.polytope, _some_ri_point(inner)):
                out.append(f"ri conv supp P_x{i} not inside I(x_{i})")
    return out


def _some_ri_point(P: Polytope):
    return sum(P.points, P.arith.zeros(P.ambient)) / len(P.points)


def irreducible_perturbation(mu, nu, eps, corners):
    """Mix in a spread-out pair so the result has a single component.

    ``nu' = uniform on corners``, ``mu' = dirac at their mean``; returns
    ``((mu + eps mu')/(1 + eps), (nu + eps nu')/(1 + eps))``.  Every atom of
    nu must lie in the interior of conv(corners).
    """
    mu, nu, ar = common_arith(mu, nu)
    eps = ar.convert(eps)
    if not ar.is_pos(eps):
        raise ValueError("eps must be positive")
    if not convex_order_check(mu, nu).ordered:
        raise NotInConvexOrder(convex_order_check(mu, nu))
    box = Polytope(corners, ar)
    if box.dim != nu.d:
        raise ValueError("corners must span a full-dimensional polytope")
    for y in nu.atoms:
        if not ri_contains(box, y):
            raise ValueError(f"nu atom {list(y)} is not interior to conv(corners)")
    k = len(box.points)
    center = sum(box.points, ar.zeros(nu.d)) / k
    scale = 1 / (1 + eps)
    mu2 = DiscreteMeasure(np.vstack([mu.atoms, center[None, :]]),
                          [w * scale for w in mu.weights] + [eps * scale], ar)
    nu2 = DiscreteMeasure(np.vstack([nu.atoms, box.points]),
                          [w * scale for w in nu.weights] + [eps * scale / k] * k, ar)
    return mu2, nu2


def default_jobs() -> int:
    return max(1, min(4, os.cpu_count() or 1))


def cell_mass_range(mu, nu, region: CouplingRegion | None = None, jobs: int = 1):
    """Minimal and maximal mass of every cell over M(mu, nu).

    ``hi - lo`` vanishing everywhere means the martingale coupling is unique.
    """
    region = _region(mu, nu, region, jobs)
    m, n = len(region.mu), len(region.nu)
    cells = [[(i, j)] for i in range(m) for j in range(n)]
    hi = region.optimize_many(cells, "max")
    lo = region.optimize_many(cells, "min")
    ar = region.arith
    H, L = ar.zeros((m, n)), ar.zeros((m, n))
    for (cell,), (h, _), (l, _) in zip(cells, hi, lo):
        H[cell], L[cell] = h, l
    return L, H
