"""Problem files in, report JSON out.

A problem file is UTF-8 JSON::

    {"dimension": 2,
     "mu": {"atoms": [[-1, 0], ["1/2", "1/2"]], "weights": ["1/2", "1/2"]},
     "nu": {"atoms": [...], "weights": [...]},
     "cost": {"type": "matrix", "values": [[...]]}
             | {"type": "expr", "formula": "abs(y[0] - x[0])"},
     "mode": "exact" | "float",
     "tolerance": 1e-9}

Numbers may be JSON numbers or strings; ``"p/q"`` strings need exact mode.
``cost`` and ``mode`` are optional (zero cost, exact).
"""
from __future__ import annotations

import ast
import json
import math
import operator
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from pathlib import Path

import numpy as np

from ._numeric import DEFAULT_TOL, Arith
from .measures import DiscreteMeasure, InvalidMeasure

SCHEMA = "motpaver.report/1"


class ProblemError(ValueError):
    """Malformed problem file; ``where`` names the offending field or line."""

    def __init__(self, message: str, where: str = ""):
        super().__init__(f"{where}: {message}" if where else message)
        self.where = where


@dataclass
class Problem:
    mu: DiscreteMeasure
    nu: DiscreteMeasure
    cost: np.ndarray
    arith: Arith
    source: dict

    @property
    def d(self) -> int:
        return self.mu.d

    def to_json(self) -> dict:
        """Canonical form: the cost is always an evaluated matrix."""
        return {
            "dimension": self.d,
            "mu": measure_json(self.mu),
            "nu": measure_json(self.nu),
            "cost": {"type": "matrix", "values": matrix_json(self.cost)},
            "mode": "exact" if self.arith.exact else "float",
            "tolerance": self.arith.tol,
        }


def _scalar(value, arith: Arith, where: str):
    if isinstance(value, bool) or value is None:
        raise ProblemError(f"expected a number, got {value!r}", where)
    try:
        if arith.exact:
            if isinstance(value, Decimal):
                return Fraction(value)
            if isinstance(value, (int, str)):
                return Fraction(value.strip() if isinstance(value, str) else value)
            if isinstance(value, float):
                return Fraction(Decimal(repr(value)))
        else:
            if isinstance(value, str) and "/" in value:
                raise ProblemError("rational strings need exact mode", where)
            v = float(value)
            if not math.isfinite(v):
                raise ProblemError("non-finite value", where)
            return v
    except (ValueError, ZeroDivisionError, ArithmeticError) as exc:
        if isinstance(exc, ProblemError):
            raise
        raise ProblemError(f"cannot parse {value!r} as a number", where) from None
    raise ProblemError(f"cannot parse {value!r} as a number", where)


def _measure(data, name: str, d: int, arith: Arith) -> DiscreteMeasure:
    if not isinstance(data, dict):
        raise ProblemError("expected an object with atoms and weights", name)
    for key in ("atoms", "weights"):
        if key not in data:
            raise ProblemError(f"missing field {key!r}", name)
    atoms, weights = data["atoms"], data["weights"]
    if not isinstance(atoms, list) or not atoms:
        raise ProblemError("atoms must be a nonempty list", f"{name}.atoms")
    if not isinstance(weights, list) or len(weights) != len(atoms):
        raise ProblemError("weights must list one value per atom", f"{name}.weights")
    pts = []
    for k, a in enumerate(atoms):
        if not isinstance(a, list):
            a = [a]
        if len(a) != d:
            raise ProblemError(f"atom has {len(a)} coordinates, dimension is {d}", f"{name}.atoms[{k}]")
        pts.append([_scalar(v, arith, f"{name}.atoms[{k}][{r}]") for r, v in enumerate(a)])
    ws = [_scalar(v, arith, f"{name}.weights[{k}]") for k, v in enumerate(weights)]
    try:
        return DiscreteMeasure(pts, ws, arith)
    except InvalidMeasure as exc:
        raise ProblemError(str(exc), name) from None


_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.Div: operator.truediv, ast.Pow: operator.pow}
_UNARY = {ast.USub: operator.neg, ast.UAdd: operator.pos}
_EXACT_FUNCS = {"abs": abs, "min": min, "max": max}
_FLOAT_FUNCS = {"sqrt": math.sqrt, "exp": math.exp, "log": math.log}


def compile_formula(formula: str, arith: Arith):
    """Arithmetic over ``x[k]``, ``y[k]``, numbers, abs/min/max (and sqrt/exp/log in float mode)."""
    try:
        tree = ast.parse(formula, mode="eval")
    except SyntaxError as exc:
        raise ProblemError(f"bad formula: {exc.msg}", "cost.formula") from None
    allowed = (ast.Expression, ast.Constant, ast.BinOp, ast.UnaryOp, ast.Subscript, ast.Call,
               ast.Name, ast.Load, *_BINOPS, *_UNARY)
    for node in ast.walk(tree):
        if not isinstance(node, allowed):
            raise ProblemError(f"unsupported syntax {type(node).__name__}", "cost.formula")

    def ev(node, x, y):
        if isinstance(node, ast.Expression):
            return ev(node.body, x, y)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) \
                and not isinstance(node.value, bool):
            return _scalar(node.value, arith, "cost.formula")
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            a, b = ev(node.left, x, y), ev(node.right, x, y)
            if isinstance(node.op, ast.Pow) and arith.exact and b.denominator != 1:
                raise ProblemError("fractional powers need float mode", "cost.formula")
            return _BINOPS[type(node.op)](a, b)
        if isinstance(node, ast.UnaryOp) and type(node.op) in _UNARY:
            return _UNARY[type(node.op)](ev(node.operand, x, y))
        if isinstance(node, ast.Subscript) and isinstance(node.value, ast.Name) \
                and node.value.id in ("x", "y"):
            k = ev(node.slice, x, y)
            vec = x if node.value.id == "x" else y
            if k != int(k) or not 0 <= int(k) < len(vec):
                raise ProblemError(f"index {k} out of range", "cost.formula")
            return vec[int(k)]
        if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and not node.keywords:
            name = node.func.id
            funcs = dict(_EXACT_FUNCS)
            if not arith.exact:
                funcs.update(_FLOAT_FUNCS)
            if name not in funcs:
                raise ProblemError(f"function {name!r} not allowed here", "cost.formula")
            return funcs[name](*[ev(a, x, y) for a in node.args])
        raise ProblemError(f"unsupported syntax {ast.dump(node)[:40]}", "cost.formula")

    def f(x, y):
        try:
            return ev(tree, list(x), list(y))
        except ZeroDivisionError:
            raise ProblemError("division by zero", "cost.formula") from None
    return f


def parse_problem(data: dict) -> Problem:
    if not isinstance(data, dict):
        raise ProblemError("top level must be an object")
    d = data.get("dimension")
    if not isinstance(d, int) or isinstance(d, bool) or d < 1:
        raise ProblemError("dimension must be a positive integer", "dimension")
    mode = data.get("mode", "exact")
    if mode not in ("exact", "float"):
        raise ProblemError("mode must be 'exact' or 'float'", "mode")
    tol = data.get("tolerance", DEFAULT_TOL)
    try:
        tol = float(tol)
    except (TypeError, ValueError):
        raise ProblemError("tolerance must be a number", "tolerance") from None
    arith = Arith(mode == "exact", tol)
    mu = _measure(data.get("mu"), "mu", d, arith)
    nu = _measure(data.get("nu"), "nu", d, arith)
    cost_def = data.get("cost", {"type": "matrix", "values": None})
    if not isinstance(cost_def, dict) or cost_def.get("type") not in ("matrix", "expr"):
        raise ProblemError("cost must be {type: matrix|expr, ...}", "cost")
    if cost_def["type"] == "matrix":
        vals = cost_def.get("values")
        if vals is None:
            cost = arith.zeros((len(mu), len(nu)))
        else:
            if not isinstance(vals, list) or len(vals) != len(mu) \
                    or any(not isinstance(r, list) or len(r) != len(nu) for r in vals):
                raise ProblemError(f"expected a {len(mu)}x{len(nu)} matrix "
                                   "(duplicate atoms are merged before matching)", "cost.values")
            cost = arith.array([[_scalar(v, arith, f"cost.values[{i}][{j}]")
                                 for j, v in enumerate(r)] for i, r in enumerate(vals)])
    else:
        formula = cost_def.get("formula")
        if not isinstance(formula, str):
            raise ProblemError("expr cost needs a formula string", "cost.formula")
        f = compile_formula(formula, arith)
        cost = arith.array([[f(x, y) for y in nu.atoms] for x in mu.atoms])
    return Problem(mu, nu, cost, arith, data)


def load_problem(path) -> Problem:
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text, parse_float=Decimal)
    except json.JSONDecodeError as exc:
        raise ProblemError(exc.msg, f"line {exc.lineno} column {exc.colno}") from None
    return parse_problem(data)


# --- report rendering ----------------------------------------------------

def scalar_json(v):
    if isinstance(v, Fraction):
        return str(v)
    return float(v)


def value_json(v) -> dict:
    """Scalar with both renderings: exact ``"p/q"`` (exact mode) and decimal."""
    out = {"decimal": float(v)}
    if isinstance(v, Fraction):
        out["exact"] = str(v)
    return out


def vector_json(vs) -> list:
    return [scalar_json(v) for v in vs]


def matrix_json(M) -> list:
    return [vector_json(r) for r in M]


def measure_json(m: DiscreteMeasure) -> dict:
    return {"atoms": matrix_json(m.atoms), "weights": vector_json(m.weights)}


def read_scalar(v, arith: Arith):
    if isinstance(v, dict):
        v = v["exact"] if arith.exact and "exact" in v else v["decimal"]
    if arith.exact:
        return Fraction(v) if isinstance(v, (str, int)) else Fraction(Decimal(repr(v)))
    return float(v)


def read_array(vs, arith: Arith) -> np.ndarray:
    arr = np.asarray(vs, dtype=object)
    out = np.empty(arr.shape, dtype=object)
    for idx, v in np.ndenumerate(arr):
        out[idx] = read_scalar(v, arith)
    return out if arith.exact else out.astype(float)


def dump(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=False)
