"""Scalar handling shared by every module.

A problem instance is either *exact* (all values are :class:`fractions.Fraction`)
or *float* (``numpy.float64`` with an absolute tolerance).  Arrays of exact
values are numpy object arrays.
"""
from __future__ import annotations

import numbers
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class Arith:
    """Comparison rules for one problem instance."""

    exact: bool = True
    tol: float = DEFAULT_TOL

    @property
    def eps(self):
        return 0 if self.exact else self.tol

    def convert(self, value):
        if self.exact:
            return to_fraction(value)
        return float(value)

    def array(self, values) -> np.ndarray:
        if self.exact:
            arr = np.asarray(values, dtype=object)
            flat = [to_fraction(v) for v in arr.ravel()]
            out = np.empty(arr.shape, dtype=object)
            out.ravel()[:] = flat if flat else []
            return out
        return np.asarray(values, dtype=float)

    def zeros(self, shape) -> np.ndarray:
        if self.exact:
            out = np.empty(shape, dtype=object)
            out.fill(Fraction(0))
            return out
        return np.zeros(shape)

    def is_zero(self, v) -> bool:
        return v == 0 if self.exact else abs(v) <= self.tol

    def is_pos(self, v) -> bool:
        return v > self.eps

    def is_neg(self, v) -> bool:
        return v < -self.eps

    def eq(self, a, b) -> bool:
        return self.is_zero(a - b)

    def leq(self, a, b) -> bool:
        return not self.is_pos(a - b)

    def join(self, other: "Arith") -> "Arith":
        if self.exact and other.exact:
            return self
        return Arith(False, max(self.tol, other.tol))


EXACT = Arith(True)
FLOAT = Arith(False)


def to_fraction(value) -> Fraction:
    """Convert ints, Fractions, mpq, decimal or ``"p/q"`` strings to a Fraction.

    Floats are rejected: an exact instance must not silently absorb binary
    rounding.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(value, numbers.Integral):
        return Fraction(int(value))
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, float):
        raise TypeError(f"float {value!r} in exact mode")
    num = getattr(value, "numerator", None)
    den = getattr(value, "denominator", None)
    if num is not None and den is not None:
        return Fraction(int(num), int(den))
    raise TypeError(f"cannot convert {type(value).__name__} to an exact scalar")


def is_rational_like(value) -> bool:
    if isinstance(value, (bool, float, np.floating)):
        return False
    if isinstance(value, (numbers.Rational, str)):
        return True
    return hasattr(value, "numerator") and hasattr(value, "denominator")


def infer_arith(*collections, tol: float = DEFAULT_TOL) -> Arith:
    """Exact when every entry is rational, float otherwise."""
    for coll in collections:
        arr = np.asarray(coll, dtype=object)
        if not all(is_rational_like(v) for v in arr.ravel()):
            return Arith(False, tol)
    return Arith(True, tol)


def fmt(value) -> str:
    """Render a scalar for reports: ``"p/q"`` for exact, repr for floats."""
    if isinstance(value, Fraction):
        return str(value)
    return repr(float(value))
