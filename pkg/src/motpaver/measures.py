"""Finitely supported probability measures and the convex-order decision."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._numeric import DEFAULT_TOL, Arith, infer_arith


class DimensionMismatch(ValueError):
    pass


class InvalidMeasure(ValueError):
    pass


class DiscreteMeasure:
    """A probability measure with finitely many atoms in R^d.

    Atoms are stored as an ``(n, d)`` array (object dtype of Fractions in
    exact mode).  Repeated atoms are merged on construction, first occurrence
    order kept.

    >>> mu = DiscreteMeasure([[-1], [1]], ["1/2", "1/2"])
    >>> mu.barycenter()
    array([Fraction(0, 1)], dtype=object)
    """

    def __init__(self, atoms, weights, arith: Arith | None = None, tol: float = DEFAULT_TOL):
        raw = np.asarray(atoms, dtype=object)
        if raw.ndim == 1:
            raw = raw.reshape(-1, 1)
        if raw.ndim != 2 or raw.shape[0] == 0 or raw.shape[1] == 0:
            raise InvalidMeasure("atoms must be a nonempty (n, d) array")
        w = np.asarray(weights, dtype=object).ravel()
        if len(w) != raw.shape[0]:
            raise InvalidMeasure(f"{raw.shape[0]} atoms but {len(w)} weights")
        if arith is None:
            arith = infer_arith(raw, w, tol=tol)
        self.arith = arith
        pts = arith.array(raw)
        w = arith.array(w)

        index: dict[tuple, int] = {}
        merged_pts, merged_w = [], []
        for p, q in zip(pts, w):
            key = tuple(p)
            if key in index:
                merged_w[index[key]] += q
            else:
                index[key] = len(merged_pts)
                merged_pts.append(p)
                merged_w.append(q)
        for q in merged_w:
            if not arith.is_pos(q):
                raise InvalidMeasure(f"nonpositive weight {q}")
        total = sum(merged_w, arith.convert(0))
        if not arith.eq(total, 1):
            raise InvalidMeasure(f"weights sum to {total}, not 1")
        self.atoms = arith.array(merged_pts) if arith.exact else np.array(merged_pts, dtype=float)
        self.atoms = self.atoms.reshape(len(merged_pts), raw.shape[1])
        self.weights = arith.array(merged_w)
        self._index = {tuple(p): k for k, p in enumerate(self.atoms)}

    @property
    def d(self) -> int:
        return self.atoms.shape[1]

    def __len__(self) -> int:
        return self.atoms.shape[0]

    def __repr__(self) -> str:
        mode = "exact" if self.arith.exact else "float"
        return f"DiscreteMeasure(n={len(self)}, d={self.d}, {mode})"

    def index(self, point) -> int:
        return self._index[tuple(self.arith.array(point).ravel())]

    def barycenter(self) -> np.ndarray:
        return self.weights @ self.atoms

    def integrate(self, values):
        """Sum of ``weights * values`` for per-atom values."""
        return sum((w * v for w, v in zip(self.weights, values)), self.arith.convert(0))

    def to_float(self) -> "DiscreteMeasure":
        ar = Arith(False, self.arith.tol)
        return DiscreteMeasure(self.atoms.astype(float), self.weights.astype(float), ar)

    def with_arith(self, arith: Arith) -> "DiscreteMeasure":
        if arith.exact == self.arith.exact:
            return self
        if arith.exact:
            raise ValueError("cannot promote a float measure to exact")
        return DiscreteMeasure(self.atoms.astype(float), self.weights.astype(float), arith)

    def same_as(self, other: "DiscreteMeasure") -> bool:
        """Equal as measures (atom order ignored)."""
        if self.d != other.d or len(self) != len(other):
            return False
        ar = self.arith.join(other.arith)
        for p, w in zip(self.atoms, self.weights):
            try:
                k = other.index(p)
            except KeyError:
                return False
            if not ar.eq(w, other.weights[k]):
                return False
        return True


def dirac(point, arith: Arith | None = None) -> DiscreteMeasure:
    return DiscreteMeasure([point], [1], arith)


def common_arith(mu: DiscreteMeasure, nu: DiscreteMeasure):
    """Bring both measures to one arithmetic mode (float wins)."""
    if mu.d != nu.d:
        raise DimensionMismatch(f"mu lives in R^{mu.d}, nu in R^{nu.d}")
    ar = mu.arith.join(nu.arith)
    return mu.with_arith(ar), nu.with_arith(ar), ar


def barycenter(m: DiscreteMeasure) -> np.ndarray:
    return m.barycenter()


@dataclass
class Separation:
    """(phi, psi, h) on atoms with phi(+)psi+h(x).(y-x) >= 0 but mu[phi]+nu[psi] < 0."""

    phi: np.ndarray
    psi: np.ndarray
    h: np.ndarray

    def value(self, mu, nu):
        return mu.integrate(self.phi) + nu.integrate(self.psi)

    def min_slack(self, mu, nu):
        return min(self.phi[i] + self.psi[j] + self.h[i] @ (nu.atoms[j] - mu.atoms[i])
                   for i in range(len(mu)) for j in range(len(nu)))

    def verify(self, mu, nu) -> bool:
        ar = mu.arith.join(nu.arith)
        return ar.is_neg(self.value(mu, nu)) and not ar.is_neg(self.min_slack(mu, nu))


@dataclass
class OrderCertificate:
    """Verdict of :func:`convex_order_check` with exactly one witness set."""

    ordered: bool
    coupling: object = None
    separation: Separation | None = None

    @property
    def verdict(self) -> bool:
        return self.ordered

    def verify(self, mu, nu) -> bool:
        if self.ordered:
            return self.separation is None and self.coupling is not None and self.coupling.is_feasible()
        return self.coupling is None and self.separation is not None and self.separation.verify(mu, nu)


def convex_order_check(mu: DiscreteMeasure, nu: DiscreteMeasure) -> OrderCertificate:
    """Decide mu <= nu in convex order by feasibility of the martingale polytope.

    When infeasible, the Farkas ray of the coupling LP is negated into a
    separating triple.
    """
    from . import linprog
    from .transport import Coupling, assemble, split_multipliers

    mu, nu, ar = common_arith(mu, nu)
    lp = assemble(mu, nu)
    sol = linprog.solve(lp)
    if sol.optimal:
        p = sol.x.reshape(len(mu), len(nu))
        return OrderCertificate(True, coupling=Coupling(mu, nu, p))
    phi, psi, h = split_multipliers(-sol.farkas, len(mu), len(nu), mu.d)
    return OrderCertificate(False, separation=Separation(phi, psi, h))


def _potential(m: DiscreteMeasure, k):
    return sum((w * abs(x[0] - k) for x, w in zip(m.atoms, m.weights)), m.arith.convert(0))


def oracle_convex_order_1d(mu: DiscreteMeasure, nu: DiscreteMeasure) -> bool:
    """Convex order on the line through potential functions u(k) = E|X - k|.

    Equal means plus ``u_mu <= u_nu`` at every atom of either measure; both
    potentials are piecewise linear with kinks only there and agree far out.
    """
    if mu.d != 1 or nu.d != 1:
        raise DimensionMismatch("the potential-function oracle needs d == 1")
    mu, nu, ar = common_arith(mu, nu)
    if not ar.eq(mu.barycenter()[0], nu.barycenter()[0]):
        return False
    kinks = {x[0] for x in mu.atoms} | {y[0] for y in nu.atoms}
    return all(ar.leq(_potential(mu, k), _potential(nu, k)) for k in kinks)
