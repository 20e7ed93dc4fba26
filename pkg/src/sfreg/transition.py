"""Transition functions: polynomial interpolants on [-1, 1] with constant tails.

A transition function equals -1 for t <= -1 and 1 for t >= 1. On [-1, 1] it is
the unique polynomial of degree ``3 + #constraints`` meeting the four base
conditions φ(±1) = ±1, φ'(±1) = 0 together with the user's interior
constraints. Coefficients are found by exact rational Gaussian elimination.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .constants import ZETA
from .errors import InvalidConstraints, SingularConstraintMatrix
from .expr import Polynomial, isolate_roots, parse_expr
from .expr.nodes import Expr

__all__ = [
    "TransitionConstraintSet", "TransitionFunction", "Overshoot",
    "synthesize", "solve_rational", "parse_rational",
]


def parse_rational(value, params=None) -> Fraction:
    """Read a rational from a number or a string such as ``"-3/2"`` or ``"(1+L)/(1-L)"``."""
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, float):
        raise InvalidConstraints(f"float {value!r} given where an exact rational is required")
    params = params or {}
    expr = parse_expr(str(value), params.keys())
    return expr.evaluate_exact(params)


def _fmt(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class TransitionConstraintSet:
    """Interior constraints on φ; the base conditions are always implied.

    ``values`` holds pairs (q, v) meaning φ(q) = v, ``derivs`` pairs (p, u)
    meaning φ'(p) = u, and ``higher`` triples (order, at, value) meaning
    φ^(order)(at) = value. Higher-order constraints may sit at ±1, which is how
    extra smoothness at the junctions is requested (φ''(±1) = 0).
    """

    values: tuple = ()
    derivs: tuple = ()
    higher: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "values", tuple((Fraction(q), Fraction(v)) for q, v in self.values))
        object.__setattr__(self, "derivs", tuple((Fraction(p), Fraction(u)) for p, u in self.derivs))
        object.__setattr__(self, "higher", tuple((int(k), Fraction(a), Fraction(w)) for k, a, w in self.higher))
        for q, _ in self.values:
            if not -1 < q < 1:
                raise InvalidConstraints(f"value constraint point {q} not inside (-1, 1)")
        for p, _ in self.derivs:
            if not -1 < p < 1:
                raise InvalidConstraints(f"derivative constraint point {p} not inside (-1, 1)")
        for k, a, _ in self.higher:
            if k < 1:
                raise InvalidConstraints("higher constraints need derivative order >= 1")
            if not -1 <= a <= 1:
                raise InvalidConstraints(f"constraint point {a} outside [-1, 1]")

    @property
    def count(self) -> int:
        return len(self.values) + len(self.derivs) + len(self.higher)

    @property
    def degree(self) -> int:
        return self.count + 3

    @classmethod
    def from_json(cls, obj, params=None):
        if isinstance(obj, str):
            obj = json.loads(obj)
        unknown = set(obj) - {"values", "derivs", "higher"}
        if unknown:
            raise InvalidConstraints(f"unknown constraint keys {sorted(unknown)}")
        try:
            values = [(parse_rational(c["q"], params), parse_rational(c["v"], params)) for c in obj.get("values", [])]
            derivs = [(parse_rational(c["p"], params), parse_rational(c["u"], params)) for c in obj.get("derivs", [])]
            higher = [(int(c["order"]), parse_rational(c["at"], params), parse_rational(c["value"], params))
                      for c in obj.get("higher", [])]
        except KeyError as exc:
            raise InvalidConstraints(f"constraint entry missing field {exc}") from None
        return cls(values, derivs, higher)

    def to_json(self) -> dict:
        out = {
            "values": [{"q": _fmt(q), "v": _fmt(v)} for q, v in self.values],
            "derivs": [{"p": _fmt(p), "u": _fmt(u)} for p, u in self.derivs],
        }
        if self.higher:
            out["higher"] = [{"order": k, "at": _fmt(a), "value": _fmt(w)} for k, a, w in self.higher]
        return out

    def rows(self):
        """(derivative order, point, target) for every constraint, base ones first."""
        rows = [(0, Fraction(-1), Fraction(-1)), (0, Fraction(1), Fraction(1)),
                (1, Fraction(-1), Fraction(0)), (1, Fraction(1), Fraction(0))]
        rows += [(0, q, v) for q, v in self.values]
        rows += [(1, p, u) for p, u in self.derivs]
        rows += list(self.higher)
        return rows


def _falling(i: int, k: int) -> int:
    out = 1
    for j in range(k):
        out *= i - j
    return out


def solve_rational(matrix, rhs):
    """Solve a square system exactly; raises :class:`SingularConstraintMatrix`."""
    n = len(matrix)
    a = [list(map(Fraction, row)) + [Fraction(b)] for row, b in zip(matrix, rhs)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
        if pivot is None:
            raise SingularConstraintMatrix(f"constraint matrix is singular (column {col})")
        a[col], a[pivot] = a[pivot], a[col]
        inv = 1 / a[col][col]
        row = [x * inv for x in a[col]]
        a[col] = row
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], row)]
    return [a[r][n] for r in range(n)]


def constraint_system(c: TransitionConstraintSet):
    n = c.degree + 1
    matrix, rhs = [], []
    for k, t, target in c.rows():
        matrix.append([_falling(i, k) * t ** (i - k) if i >= k else Fraction(0) for i in range(n)])
        rhs.append(target)
    return matrix, rhs


def synthesize(c: TransitionConstraintSet) -> "TransitionFunction":
    matrix, rhs = constraint_system(c)
    coeffs = solve_rational(matrix, rhs)
    return TransitionFunction(tuple(coeffs), constraints=c)


@dataclass(frozen=True)
class Overshoot:
    max_abs: float
    at: tuple
    exceeds_one: bool

    def to_json(self):
        return {"max_abs": self.max_abs, "at": list(self.at), "exceeds_one": self.exceeds_one}


def _pad(coeffs):
    out = [Fraction(c) for c in coeffs]
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return tuple(out)


@dataclass(frozen=True)
class TransitionFunction:
    """Piecewise φ: -1, an interior polynomial (ascending ``coeffs``), then 1."""

    coeffs: tuple
    constraints: TransitionConstraintSet | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _pad(self.coeffs))
        for k, t, target in TransitionConstraintSet().rows():
            if self.exact(t, k) != target:
                raise InvalidConstraints(
                    f"interior polynomial violates the junction condition φ^({k})({t}) = {target}")

    @classmethod
    def from_expr(cls, text: str, var: str = "t"):
        from .expr import to_polynomial
        return cls(tuple(to_polynomial(parse_expr(text, {var}), (var,)).coeffs()))

    @classmethod
    def from_json(cls, obj, params=None):
        """Accepts ``{"coefficients": [...]}``, ``{"expr": "..."}`` or a constraint set."""
        if isinstance(obj, str):
            obj = json.loads(obj)
        if "coefficients" in obj:
            return cls(tuple(parse_rational(c, params) for c in obj["coefficients"]))
        if "expr" in obj:
            text = obj["expr"]
            if params:
                e = parse_expr(text, set(params) | {"t"}).substitute(params)
                from .expr import to_polynomial
                return cls(tuple(to_polynomial(e, ("t",)).coeffs()))
            return cls.from_expr(text)
        return synthesize(TransitionConstraintSet.from_json(obj, params))

    def to_json(self) -> dict:
        out = {"coefficients": [_fmt(c) for c in self.coeffs], "expr": str(self.to_expr("t"))}
        if self.constraints is not None:
            out["constraints"] = self.constraints.to_json()
        return out

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def polynomial(self) -> Polynomial:
        return Polynomial.from_coeffs(self.coeffs, "t")

    def deriv_coeffs(self, k: int = 1):
        c = list(self.coeffs)
        for _ in range(k):
            c = [i * a for i, a in enumerate(c)][1:] or [Fraction(0)]
        return c

    def to_expr(self, var: str = "t") -> Expr:
        return Polynomial.from_coeffs(self.coeffs, var).to_expr()

    def exact(self, t, k: int = 0) -> Fraction:
        """Exact value of the k-th derivative of the interior polynomial at rational t."""
        t = Fraction(t)
        acc = Fraction(0)
        for a in reversed(self.deriv_coeffs(k)):
            acc = acc * t + a
        return acc

    def _interior(self, t, k):
        c = [float(a) for a in self.deriv_coeffs(k)]
        return np.polynomial.polynomial.polyval(t, c)

    def eval(self, t, order: int = 0):
        """Piecewise value of φ^(order) at t (scalar or array)."""
        if order > 3 or order < 0:
            raise ValueError("order must be between 0 and 3")
        if np.ndim(t) == 0:
            t = float(t)
            if t < -1:
                return -1.0 if order == 0 else 0.0
            if t > 1:
                return 1.0 if order == 0 else 0.0
            return float(self._interior(t, order))
        t = np.asarray(t, dtype=float)
        inner = self._interior(np.clip(t, -1.0, 1.0), order)
        if order == 0:
            return np.where(t < -1, -1.0, np.where(t > 1, 1.0, inner))
        return np.where(np.abs(t) > 1, 0.0, inner)

    __call__ = eval

    def eval_deriv(self, t, order: int = 1):
        return self.eval(t, order)

    def critical_intervals(self):
        return isolate_roots(self.deriv_coeffs(1), (-1, 1), closed=False)

    def critical_points(self):
        """(t, φ(t)) for each zero of φ' inside (-1, 1), ascending."""
        return [(r.root, self.eval(r.root)) for r in self.critical_intervals()]

    def overshoot(self) -> Overshoot:
        candidates = [(-1.0, -1.0), (1.0, 1.0)] + self.critical_points()
        m = max(abs(v) for _, v in candidates)
        at = tuple(sorted(t for t, v in candidates if abs(abs(v) - m) <= ZETA))
        return Overshoot(m, at, m > 1 + ZETA)

    def is_monotonic(self) -> bool:
        if self.critical_intervals():
            return False
        return self.exact(0, 1) > 0

    def inverse_roots(self, level) -> list:
        """All t in [-1, 1] with φ(t) = level, ascending."""
        target = Fraction(level) if not isinstance(level, float) else Fraction(level).limit_denominator(10**15)
        c = list(self.coeffs)
        c[0] -= target
        if all(a == 0 for a in c):
            return []
        return [r.root for r in isolate_roots(c, (-1, 1))]

    def sample_table(self, n: int):
        """Rows (t, φ, φ') on a uniform grid of n points in [-1, 1]."""
        t = np.linspace(-1.0, 1.0, n)
        return np.column_stack([t, self.eval(t), self.eval(t, 1)])

