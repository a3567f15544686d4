"""Exact and float solvers for discrete martingale optimal transport.

Convex-order checks, the primal/dual LP with certificates, the irreducible
paving of (mu, nu), componentwise decomposition and monotonicity checks.
"""
from .decomposition import check_decomposition, componentwise_dual, glue, sub_paving
from .geometry import Polytope, closure_contains, hull_equal, ri_contains, ri_intersects
from .linprog import LinearProgram, FeasibleRegion, solve
from .measures import DiscreteMeasure, convex_order_check, dirac, oracle_convex_order_1d
from .monotonicity import FinitePlan, certify_support, competitor_max, optimality_iff_concentrated
from .paving import compute_paving, nu_invariance
from .transport import Coupling, NotInConvexOrder, solve_mot

__version__ = "0.1.0"

__all__ = [
    "DiscreteMeasure", "dirac", "convex_order_check", "oracle_convex_order_1d",
    "Polytope", "closure_contains", "ri_contains", "ri_intersects", "hull_equal",
    "LinearProgram", "FeasibleRegion", "solve",
    "Coupling", "NotInConvexOrder", "solve_mot",
    "compute_paving", "nu_invariance",
    "check_decomposition", "componentwise_dual", "glue", "sub_paving",
    "FinitePlan", "certify_support", "competitor_max", "optimality_iff_concentrated",
]
