"""Planar piecewise smooth vector fields switching on the line x = 0."""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .constants import BISECT_TOL, ZETA
from .errors import IdenticallyZero, NotPolynomial, OutsideDomain
from .expr import Expr, eval_jet, isolate_roots, parse_expr, to_polynomial
from .transition import parse_rational

__all__ = [
    "PSVF", "SigmaPointClass", "SlidingField", "lie_derivative", "lie_derivatives",
    "classify_sigma_point", "kind_from_witnesses", "sliding_field", "sliding_equilibria",
    "SIGMA_KINDS",
]

SIGMA_KINDS = (
    "sewing", "sliding", "escaping",
    "fold_visible_X", "fold_invisible_X", "fold_visible_Y", "fold_invisible_Y",
    "fold_fold", "cusp_X", "cusp_Y", "degenerate",
)

_XY = ("x", "y")


def load_components(texts, params, names=_XY):
    """Parse component strings and substitute rational parameter values."""
    params = {k: parse_rational(v) for k, v in (params or {}).items()}
    allowed = set(names) | set(params)
    exprs = []
    for text in texts:
        e = text if isinstance(text, Expr) else parse_expr(str(text), allowed)
        exprs.append(e.substitute(params) if params else e)
    return tuple(exprs), params


@dataclass(frozen=True)
class PSVF:
    """X = (f1, f2) on x > 0 and Y = (g1, g2) on x < 0, with F(x, y) = x."""

    f1: Expr
    f2: Expr
    g1: Expr
    g2: Expr
    params: dict = field(default_factory=dict, compare=False)

    @classmethod
    def from_strings(cls, X, Y, params=None):
        exprs, params = load_components(list(X) + list(Y), params)
        return cls(*exprs, params=params)

    @classmethod
    def from_json(cls, obj, params=None):
        if isinstance(obj, str):
            obj = json.loads(obj)
        merged = dict(obj.get("params", {}))
        merged.update(params or {})
        return cls.from_strings(obj["X"], obj["Y"], merged)

    def to_json(self) -> dict:
        return {"X": [str(self.f1), str(self.f2)], "Y": [str(self.g1), str(self.g2)]}

    def field(self, which):
        if which == "X":
            return self.f1, self.f2
        if which == "Y":
            return self.g1, self.g2
        raise ValueError("which must be 'X' or 'Y'")

    def components_at(self, x, y):
        env = {"x": x, "y": y}
        return tuple(e.evaluate(env) for e in (self.f1, self.f2, self.g1, self.g2))


def lie_derivatives(psvf: PSVF, which: str, y0: float) -> tuple:
    """(ZF, Z²F, Z³F) at (0, y0) for Z = X or Y."""
    h1, h2 = psvf.field(which)
    point = {"x": 0.0, "y": float(y0)}
    a = eval_jet(h1, point, _XY)
    b = eval_jet(h2, point, _XY)
    f, fx, fy = a.value, a.d("x"), a.d("y")
    fxx, fxy, fyy = a.d("x", "x"), a.d("x", "y"), a.d("y", "y")
    g, gx, gy = b.value, b.d("x"), b.d("y")
    first = f
    second = f * fx + g * fy
    dx = fx * fx + f * fxx + gx * fy + g * fxy
    dy = fy * fx + f * fxy + gy * fy + g * fyy
    third = f * dx + g * dy
    return first, second, third


def lie_derivative(psvf: PSVF, which: str, order: int, y0: float) -> float:
    if order not in (1, 2, 3):
        raise ValueError("order must be 1, 2 or 3")
    return lie_derivatives(psvf, which, y0)[order - 1]


def _zero(v, tol=ZETA):
    return abs(v) <= tol


def kind_from_witnesses(w: dict, tol=ZETA) -> str:
    xf, yf = w["XF"], w["YF"]
    if not _zero(xf, tol) and not _zero(yf, tol):
        if (xf > 0) == (yf > 0):
            return "sewing"
        return "sliding" if xf < 0 else "escaping"
    if _zero(xf, tol) and _zero(yf, tol):
        if not _zero(w["X2F"], tol) and not _zero(w["Y2F"], tol):
            return "fold_fold"
        return "degenerate"
    if _zero(xf, tol):
        if not _zero(w["X2F"], tol):
            return "fold_visible_X" if w["X2F"] > 0 else "fold_invisible_X"
        return "cusp_X" if not _zero(w["X3F"], tol) else "degenerate"
    if not _zero(w["Y2F"], tol):
        return "fold_visible_Y" if w["Y2F"] < 0 else "fold_invisible_Y"
    return "cusp_Y" if not _zero(w["Y3F"], tol) else "degenerate"


@dataclass(frozen=True)
class SigmaPointClass:
    y0: float
    kind: str
    witnesses: dict
    visibility: dict

    @property
    def point(self):
        return (0.0, self.y0)

    def recompute(self, tol=ZETA) -> str:
        return kind_from_witnesses(self.witnesses, tol)

    def to_json(self) -> dict:
        return {"point": [0.0, self.y0], "kind": self.kind,
                "witnesses": dict(self.witnesses), "visibility": dict(self.visibility)}


def classify_sigma_point(psvf: PSVF, y0: float, tol=ZETA) -> SigmaPointClass:
    xs = lie_derivatives(psvf, "X", y0)
    ys = lie_derivatives(psvf, "Y", y0)
    w = {"XF": xs[0], "YF": ys[0], "X2F": xs[1], "Y2F": ys[1], "X3F": xs[2], "Y3F": ys[2]}
    visibility = {}
    if _zero(xs[0], tol) and not _zero(xs[1], tol):
        visibility["X"] = "visible" if xs[1] > 0 else "invisible"
    if _zero(ys[0], tol) and not _zero(ys[1], tol):
        visibility["Y"] = "visible" if ys[1] < 0 else "invisible"
    return SigmaPointClass(float(y0), kind_from_witnesses(w, tol), w, visibility)


@dataclass(frozen=True)
class SlidingField:
    """Z^Σ(y) = (f2·g1 − g2·f1)/(g1 − f1) on Σ, defined where |g1 − f1| > ζ."""

    numerator: Expr
    denominator: Expr

    def denominator_at(self, y):
        return self.denominator.evaluate({"x": 0.0, "y": y})

    def in_domain(self, y) -> bool:
        return abs(self.denominator_at(float(y))) > ZETA

    def __call__(self, y):
        y = float(y)
        den = self.denominator_at(y)
        if abs(den) <= ZETA:
            raise OutsideDomain(f"g1 = f1 at y = {y}; the sliding field is undefined there")
        return self.numerator.evaluate({"x": 0.0, "y": y}) / den


def _on_sigma(e: Expr) -> Expr:
    return e.substitute({"x": 0})


def sliding_field(psvf: PSVF) -> SlidingField:
    f1, f2, g1, g2 = (_on_sigma(e) for e in (psvf.f1, psvf.f2, psvf.g1, psvf.g2))
    return SlidingField(f2 * g1 - g2 * f1, g1 - f1)


def _bisect(fn, a, b, fa, tol):
    while b - a > tol:
        m = 0.5 * (a + b)
        fm = fn(m)
        if fm == 0:
            return m
        if (fm > 0) == (fa > 0):
            a, fa = m, fm
        else:
            b = m
    return 0.5 * (a + b)


def sliding_equilibria(psvf: PSVF, interval=(-1.0, 1.0), samples=2001) -> list:
    """Zeros of Z^Σ in ``interval`` that lie in its domain.

    A numerator that vanishes identically means every domain point is an
    equilibrium; that continuum is not enumerated and the result is empty.
    """
    zs = sliding_field(psvf)
    a, b = interval
    try:
        poly = to_polynomial(zs.numerator, ("y",))
        try:
            roots = [r.root for r in isolate_roots(poly, (_rat(a), _rat(b)))]
        except IdenticallyZero:
            return []
    except NotPolynomial:
        grid = np.linspace(a, b, samples)
        num = lambda y: zs.numerator.evaluate({"x": 0.0, "y": y})
        vals = [num(float(t)) for t in grid]
        roots = []
        for i in range(len(grid) - 1):
            if vals[i] == 0:
                roots.append(float(grid[i]))
            elif vals[i] * vals[i + 1] < 0:
                roots.append(_bisect(num, float(grid[i]), float(grid[i + 1]), vals[i], BISECT_TOL))
        if vals[-1] == 0:
            roots.append(float(grid[-1]))
    return [y for y in roots if zs.in_domain(y)]


def _rat(v):
    from fractions import Fraction
    return Fraction(v) if not isinstance(v, str) else parse_rational(v)
