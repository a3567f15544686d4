"""Worked instances with known answers, used by the demos and the tests.

``example_4_2`` is the two-dimensional instance whose martingale couplings
form a segment between two vertex couplings; ``example_2_1`` and
``example_4_1`` discretize marginals that have a density part.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction as F

import numpy as np

from .measures import DiscreteMeasure
from .transport import Coupling


@dataclass
class Instance:
    name: str
    mu: DiscreteMeasure
    nu: DiscreteMeasure
    mu_labels: list[str]
    nu_labels: list[str]
    cost: np.ndarray | None = None
    couplings: dict[str, Coupling] = field(default_factory=dict)
    notes: dict = field(default_factory=dict)


# --- two triangles sharing an edge ---------------------------------------

X42 = {"x0": (F(-1), F(0)), "x1": (F(1, 2), F(1, 2)), "x-1": (F(1, 2), F(-1, 2))}
Y42 = {"y-2": (F(-2), F(0)), "y2": (F(2), F(0)), "y0": (F(0), F(0)),
       "y1": (F(0), F(1)), "y-1": (F(0), F(-1))}

# displayed vertex couplings, keyed (x label, y label)
P2_TABLE = {("x0", "y-2"): F(1, 6), ("x0", "y1"): F(1, 12), ("x0", "y-1"): F(1, 12),
            ("x1", "y1"): F(1, 6), ("x1", "y0"): F(1, 12), ("x1", "y2"): F(1, 12),
            ("x-1", "y-1"): F(1, 6), ("x-1", "y0"): F(1, 12), ("x-1", "y2"): F(1, 12)}
P1_TABLE_AS_PRINTED = {("x0", "y-2"): F(1, 6), ("x0", "y0"): F(1, 6),
                       ("x1", "y2"): F(1, 12), ("x1", "y1"): F(3, 16), ("x1", "y-1"): F(1, 16),
                       ("x-1", "y2"): F(1, 12), ("x-1", "y-1"): F(3, 16), ("x-1", "y1"): F(1, 16)}
# 3/16, 1/16 leave x1's row barycenter at (1/2, 3/8); the martingale row
# forces 5/24 and 1/24 with the same support and Y-marginal.
P1_TABLE = dict(P1_TABLE_AS_PRINTED)
P1_TABLE.update({("x1", "y1"): F(5, 24), ("x1", "y-1"): F(1, 24),
                 ("x-1", "y-1"): F(5, 24), ("x-1", "y1"): F(1, 24)})


def _table_coupling(mu, nu, mu_labels, nu_labels, table) -> Coupling:
    p = np.full((len(mu), len(nu)), F(0), dtype=object)
    for (xl, yl), v in table.items():
        p[mu_labels.index(xl), nu_labels.index(yl)] = v
    return Coupling(mu, nu, p)


def example_4_2() -> Instance:
    mu_labels = ["x0", "x1", "x-1"]
    nu_labels = ["y-2", "y2", "y0", "y1", "y-1"]
    mu = DiscreteMeasure([X42[k] for k in mu_labels], [F(1, 3)] * 3)
    nu = DiscreteMeasure([Y42[k] for k in nu_labels],
                         [F(1, 6), F(1, 6), F(1, 6), F(1, 4), F(1, 4)])
    cost = np.full((3, 5), F(0), dtype=object)
    cost[0, nu_labels.index("y1")] = F(1)
    inst = Instance("example-4.2", mu, nu, mu_labels, nu_labels, cost)
    for name, table in (("P1", P1_TABLE), ("P2", P2_TABLE),
                        ("P1_as_printed", P1_TABLE_AS_PRINTED)):
        inst.couplings[name] = _table_coupling(mu, nu, mu_labels, nu_labels, table)
    inst.notes["components"] = [
        {"members": ["x0"], "vertices": [Y42["y-2"], Y42["y1"], Y42["y-1"]]},
        {"members": ["x1", "x-1"], "vertices": [Y42["y2"], Y42["y1"], Y42["y-1"]]},
    ]
    inst.notes["sub_components"] = [
        [Y42["y0"], Y42["y1"], Y42["y2"]], [Y42["y0"], Y42["y-1"], Y42["y2"]]]
    return inst


# --- one-dimensional instance with a density part ------------------------

def example_2_1(n: int = 16) -> Instance:
    """mu = (d_{-1} + d_1)/2, nu = (Leb|[-2,2] + d_{-2} + 2 d_0 + d_2)/8.

    The Lebesgue part is replaced by ``n`` atoms at the midpoints of a
    uniform partition of [-2, 2], each carrying its cell mass ``1/(2n)``.
    ``n`` must be even so that 0 stays a cell boundary.
    """
    if n <= 0 or n % 2:
        raise ValueError("grid size must be a positive even integer")
    h = F(4, n)
    mids = [F(-2) + (k + F(1, 2)) * h for k in range(n)]
    atoms = [F(-2), F(0), F(2)] + mids
    weights = [F(1, 8), F(2, 8), F(1, 8)] + [F(1, 2 * n)] * n
    mu = DiscreteMeasure([[F(-1)], [F(1)]], [F(1, 2), F(1, 2)])
    nu = DiscreteMeasure([[a] for a in atoms], weights)
    labels = ["-2", "0", "2"] + [str(m) for m in mids]
    inst = Instance(f"example-2.1 (grid {n})", mu, nu, ["-1", "1"], labels)
    inst.notes["intervals"] = [(F(-2), F(0)), (F(0), F(2))]
    inst.notes["boundary_atoms"] = [{F(-2), F(0)}, {F(0), F(2)}]
    return inst


# --- unique coupling with three quadrilateral components ----------------

def example_4_1(n: int = 8, exact: bool = True) -> Instance:
    """mu = d_{x1}/2 + d_{x2}/4 + d_{x3}/4, nu uniform on [-1, 1]^2.

    nu is replaced by the midpoints of an ``n x n`` grid with mass ``1/n^2``
    each; ``n`` must be even so the axes stay cell boundaries.
    """
    if n <= 0 or n % 2:
        raise ValueError("grid size must be a positive even integer")
    h = F(2, n)
    mids = [F(-1) + (k + F(1, 2)) * h for k in range(n)]
    pts = [(a, b) for a in mids for b in mids]
    x = [(F(-1, 2), F(0)), (F(1, 2), F(1, 2)), (F(1, 2), F(-1, 2))]
    wmu = [F(1, 2), F(1, 4), F(1, 4)]
    wnu = [F(1, n * n)] * len(pts)
    if exact:
        mu, nu = DiscreteMeasure(x, wmu), DiscreteMeasure(pts, wnu)
    else:
        mu = DiscreteMeasure(np.array(x, dtype=float), np.array(wmu, dtype=float))
        nu = DiscreteMeasure(np.array(pts, dtype=float), np.array(wnu, dtype=float))
    inst = Instance(f"example-4.1 (grid {n})", mu, nu, ["x1", "x2", "x3"],
                    [f"({a},{b})" for a, b in pts])
    inst.notes["quadrilaterals"] = [
        [(-1, -1), (-1, 1), (0, 1), (0, -1)],
        [(0, 1), (1, 1), (1, 0), (0, 0)],
        [(0, 0), (1, 0), (1, -1), (0, -1)],
    ]
    return inst


DEMOS = {"example-2.1": example_2_1, "example-4.1": example_4_1, "example-4.2": example_4_2}
