"""Regularizations of a PSVF and their directional blow-ups to slow-fast form."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import FamilyEndpointMismatch, NotPolynomial
from .expr import Const, Expr, Polynomial, Var, eval_jet, parse_expr, to_polynomial
from .psvf import PSVF, load_components
from .transition import TransitionFunction

__all__ = [
    "NonlinearFamily", "SlowFastSystem", "RegularizedField",
    "linear_family", "linear_regularize", "nonlinear_regularize",
    "blowup_linear", "blowup_nonlinear",
]

_HALF = Const(Fraction(1, 2))
SF_VARS = ("x", "y", "eps")


@dataclass(frozen=True)
class NonlinearFamily:
    """Z̃(L, x, y) = (z1, z2) with Z̃(-1, ·) = Y and Z̃(1, ·) = X."""

    z1: Expr
    z2: Expr
    X: tuple | None = None
    Y: tuple | None = None
    window: tuple = ((-1.0, 1.0), (-1.0, 1.0))

    def __post_init__(self):
        if self.X is not None or self.Y is not None:
            self.check_endpoints()

    @classmethod
    def from_strings(cls, ztilde, variables=("L", "x", "y"), X=None, Y=None, params=None, window=None):
        lam, xv, yv = variables
        exprs, params = load_components(ztilde, params, names=variables)
        rename = {lam: Var("L"), xv: Var("x"), yv: Var("y")}
        z1, z2 = (e.substitute(rename) for e in exprs)
        Xe = load_components(X, params)[0] if X is not None else None
        Ye = load_components(Y, params)[0] if Y is not None else None
        kwargs = {"window": tuple(map(tuple, window))} if window is not None else {}
        return cls(z1, z2, Xe, Ye, **kwargs)

    @classmethod
    def from_json(cls, obj, params=None):
        if isinstance(obj, str):
            obj = json.loads(obj)
        merged = dict(obj.get("params", {}))
        merged.update(params or {})
        return cls.from_strings(obj["Ztilde"], tuple(obj.get("vars", ("L", "x", "y"))),
                                obj.get("X"), obj.get("Y"), merged, obj.get("window"))

    def to_json(self) -> dict:
        out = {"Ztilde": [str(self.z1), str(self.z2)], "vars": ["L", "x", "y"]}
        if self.X is not None:
            out["X"] = [str(e) for e in self.X]
        if self.Y is not None:
            out["Y"] = [str(e) for e in self.Y]
        return out

    def at(self, lam) -> tuple:
        c = Const(Fraction(lam))
        return tuple(e.substitute({"L": c}) for e in (self.z1, self.z2))

    def psvf(self) -> PSVF:
        X = self.X if self.X is not None else self.at(1)
        Y = self.Y if self.Y is not None else self.at(-1)
        return PSVF(X[0], X[1], Y[0], Y[1])

    def check_endpoints(self, n=20, tol=1e-9):
        (xa, xb), (ya, yb) = self.window
        xs, ys = np.meshgrid(np.linspace(xa, xb, n), np.linspace(ya, yb, n))
        for lam, target, label in ((1.0, self.X, "X"), (-1.0, self.Y, "Y")):
            if target is None:
                continue
            env = {"L": np.full_like(xs, lam), "x": xs, "y": ys}
            for k, (z, t) in enumerate(zip((self.z1, self.z2), target)):
                a = np.broadcast_to(z.evaluate(env), xs.shape)
                b = np.broadcast_to(t.evaluate({"x": xs, "y": ys}), xs.shape)
                err = np.max(np.abs(a - b) / np.maximum(1.0, np.abs(b)))
                if not err <= tol:
                    raise FamilyEndpointMismatch(
                        f"component {k + 1} of the family at L = {lam:+g} differs from {label} by {err:.3g}")


def linear_family(psvf: PSVF) -> NonlinearFamily:
    """The linear regularization written as a family: ((1+L)/2)X + ((1-L)/2)Y."""
    L = Var("L")
    a = (1 + L) * _HALF
    b = (1 - L) * _HALF
    return NonlinearFamily(a * psvf.f1 + b * psvf.g1, a * psvf.f2 + b * psvf.g2,
                           (psvf.f1, psvf.f2), (psvf.g1, psvf.g2))


@dataclass(frozen=True)
class RegularizedField:
    """Planar field Z_ε; equals X for x ≥ ε and Y for x ≤ -ε."""

    X: tuple
    Y: tuple
    blend: object
    tf: TransitionFunction
    eps: float

    def __call__(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        env = {"x": x, "y": y}
        xv = [np.broadcast_to(e.evaluate(env), np.broadcast(x, y).shape) for e in self.X]
        yv = [np.broadcast_to(e.evaluate(env), np.broadcast(x, y).shape) for e in self.Y]
        mid = self.blend(x, y)
        out = []
        for k in range(2):
            inner = np.where(x >= self.eps, xv[k], np.where(x <= -self.eps, yv[k], mid[k]))
            out.append(inner[()] if inner.ndim == 0 else inner)
        return out[0], out[1]


def linear_regularize(psvf: PSVF, tf: TransitionFunction, eps: float) -> RegularizedField:
    if eps <= 0:
        raise ValueError("eps must be positive")

    def blend(x, y):
        s = tf.eval(x / eps)
        f1, f2, g1, g2 = psvf.components_at(x, y)
        return ((1 + s) / 2 * f1 + (1 - s) / 2 * g1, (1 + s) / 2 * f2 + (1 - s) / 2 * g2)

    return RegularizedField((psvf.f1, psvf.f2), (psvf.g1, psvf.g2), blend, tf, eps)


def nonlinear_regularize(fam: NonlinearFamily, tf: TransitionFunction, eps: float) -> RegularizedField:
    if eps <= 0:
        raise ValueError("eps must be positive")
    fam.check_endpoints()
    p = fam.psvf()

    def blend(x, y):
        env = {"L": tf.eval(x / eps), "x": x, "y": y}
        return fam.z1.evaluate(env), fam.z2.evaluate(env)

    return RegularizedField((p.f1, p.f2), (p.g1, p.g2), blend, tf, eps)


@dataclass(frozen=True)
class SlowFastSystem:
    """εẋ = f(x, y, ε), ẏ = g(x, y, ε) in slow time.

    ``chart`` is the admissible x-range (the blow-up chart is [-1, 1]); None
    means unrestricted. ``tf`` is the transition function the system was built
    from, when there is one.
    """

    f: Expr
    g: Expr
    tf: TransitionFunction | None = field(default=None, compare=False)
    chart: tuple | None = None
    polys: tuple | None = field(default=None, compare=False, repr=False)

    @classmethod
    def from_strings(cls, f, g, chart=None, params=None, tf=None):
        exprs, _ = load_components([f, g], params, names=SF_VARS)
        return cls(exprs[0], exprs[1], tf=tf, chart=tuple(chart) if chart is not None else None)

    @classmethod
    def from_json(cls, obj, params=None):
        if isinstance(obj, str):
            obj = json.loads(obj)
        merged = dict(obj.get("params", {}))
        merged.update(params or {})
        tf = TransitionFunction.from_json(obj["phi"]) if "phi" in obj else None
        return cls.from_strings(obj["f"], obj["g"], obj.get("chart"), merged, tf)

    def to_json(self) -> dict:
        out = {"f": str(self.f), "g": str(self.g), "chart": list(self.chart) if self.chart else None}
        if self.tf is not None:
            out["phi"] = {"coefficients": self.tf.to_json()["coefficients"]}
        return out

    @property
    def f0(self) -> Expr:
        return self.f.substitute({"eps": 0})

    @property
    def g0(self) -> Expr:
        return self.g.substitute({"eps": 0})

    def evaluate(self, x, y, eps=0.0):
        env = {"x": x, "y": y, "eps": eps}
        return self.f.evaluate(env), self.g.evaluate(env)

    def jets(self, x, y, eps=0.0, wrt=("x", "y")):
        point = {"x": float(x), "y": float(y), "eps": float(eps)}
        return eval_jet(self.f, point, wrt), eval_jet(self.g, point, wrt)

    def polynomials(self):
        """(f, g) as Polynomials over (x, y, eps); raises NotPolynomial otherwise."""
        if self.polys is not None:
            return self.polys
        return tuple(to_polynomial(e, SF_VARS) for e in (self.f, self.g))


def _scaled_components(exprs):
    """Substitute x -> eps*x, as polynomials when possible."""
    try:
        polys = [to_polynomial(e, ("x", "y")) for e in exprs]
    except NotPolynomial:
        scaled = Var("eps") * Var("x")
        return None, [e.substitute({"x": scaled}) for e in exprs]
    ex = Polynomial.variable("eps", SF_VARS) * Polynomial.variable("x", SF_VARS)
    return [p.substitute({"x": ex}).with_vars(SF_VARS) for p in polys], None


def blowup_linear(psvf: PSVF, tf: TransitionFunction) -> SlowFastSystem:
    """f = (f1+g1)/2 + φ(x)(f1-g1)/2, g likewise, components taken at (εx, y)."""
    polys, exprs = _scaled_components((psvf.f1, psvf.f2, psvf.g1, psvf.g2))
    if polys is not None:
        phi = tf.polynomial.substitute({"t": Polynomial.variable("x", SF_VARS)}).with_vars(SF_VARS)
        half = Fraction(1, 2)
        f1, f2, g1, g2 = polys
        fp = (f1 + g1) * half + phi * (f1 - g1) * half
        gp = (f2 + g2) * half + phi * (f2 - g2) * half
        return SlowFastSystem(fp.to_expr(), gp.to_expr(), tf=tf, chart=(-1.0, 1.0), polys=(fp, gp))
    phi = tf.to_expr("x")
    f1, f2, g1, g2 = exprs
    f = (f1 + g1) * _HALF + phi * (f1 - g1) * _HALF
    g = (f2 + g2) * _HALF + phi * (f2 - g2) * _HALF
    return SlowFastSystem(f, g, tf=tf, chart=(-1.0, 1.0))


def blowup_nonlinear(fam: NonlinearFamily, tf: TransitionFunction) -> SlowFastSystem:
    """f = Z̃¹(φ(x), εx, y), g = Z̃²(φ(x), εx, y)."""
    fam.check_endpoints()
    try:
        zs = [to_polynomial(e, ("L", "x", "y")) for e in (fam.z1, fam.z2)]
    except NotPolynomial:
        mapping = {"L": tf.to_expr("x"), "x": Var("eps") * Var("x")}
        f, g = (e.substitute(mapping) for e in (fam.z1, fam.z2))
        return SlowFastSystem(f, g, tf=tf, chart=(-1.0, 1.0))
    mapping = {
        "L": tf.polynomial.substitute({"t": Polynomial.variable("x", SF_VARS)}).with_vars(SF_VARS),
        "x": Polynomial.variable("eps", SF_VARS) * Polynomial.variable("x", SF_VARS),
    }
    fp, gp = (z.substitute(mapping).with_vars(SF_VARS) for z in zs)
    return SlowFastSystem(fp.to_expr(), gp.to_expr(), tf=tf, chart=(-1.0, 1.0), polys=(fp, gp))
