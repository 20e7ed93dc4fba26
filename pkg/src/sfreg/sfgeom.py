"""Critical sets and singularity classification for slow-fast systems.

Every classification returns a :class:`SingularityReport` whose ledger holds
each evaluated quantity with its requirement, so the verdict can be recomputed
from the report alone.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .constants import BISECT_TOL, ZETA
from .errors import (
    IdenticallyZero, NoFastEquilibrium, NonMonotonicPhi, NotOnCriticalSet, NotPolynomial,
)
from .expr import eval_jet, isolate_roots, to_polynomial
from .psvf import PSVF, classify_sigma_point, sliding_field
from .regularize import SF_VARS, NonlinearFamily, SlowFastSystem, blowup_linear
from .transition import TransitionFunction

__all__ = [
    "Condition", "SingularityReport", "CriticalSetSample",
    "critical_set", "classify_generic", "predict_linear", "predict_nonlinear",
    "theorem_a_report", "polish_on_critical_set", "verdict_from_ledger",
    "fast_equilibria",
]

VERDICTS = ("normally_hyperbolic", "sf_fold", "sf_transcritical", "sf_pitchfork",
            "degenerate", "impossible_linear_pitchfork")


# -- condition ledger ---------------------------------------------------------

def check(value: float, required: str, tol: float = ZETA) -> bool:
    if value is None or not math.isfinite(value):
        return False
    if required == "=0":
        return abs(value) <= tol
    if required == "≠0":
        return abs(value) > tol
    if required == "<0":
        return value < -tol
    if required == ">0":
        return value > tol
    raise ValueError(f"unknown requirement {required!r}")


@dataclass(frozen=True)
class Condition:
    name: str
    value: float
    required: str
    satisfied: bool
    set: str

    def to_json(self) -> dict:
        return {"name": self.name, "value": self.value, "required": self.required,
                "satisfied": self.satisfied, "set": self.set}


class _Ledger:
    def __init__(self, tol):
        self.tol = tol
        self.entries = []
        self.order = []

    def add(self, group, name, value, required):
        if group not in self.order:
            self.order.append(group)
        value = float(value)
        self.entries.append(Condition(name, value, required, check(value, required, self.tol), group))

    def verdict(self):
        return verdict_from_ledger(self.entries, self.order)


def verdict_from_ledger(entries, order, tol=None) -> str:
    """First condition set whose entries all hold; ``degenerate`` otherwise."""
    for group in order:
        members = [c for c in entries if c.set == group]
        ok = all(check(c.value, c.required, tol) if tol is not None else c.satisfied for c in members)
        if members and ok:
            return group
    return "degenerate"


@dataclass
class SingularityReport:
    point: tuple
    verdict: str
    ledger: list
    order: list
    method: str
    info: dict = field(default_factory=dict)

    def value(self, name, group=None) -> float:
        for c in self.ledger:
            if c.name == name and (group is None or c.set == group):
                return c.value
        raise KeyError(name)

    def recompute(self, tol=ZETA) -> str:
        return verdict_from_ledger(self.ledger, self.order, tol)

    def to_json(self) -> dict:
        return {"point": [float(v) for v in self.point], "verdict": self.verdict,
                "method": self.method, "order": list(self.order),
                "ledger": [c.to_json() for c in self.ledger], "info": _jsonable(self.info)}

    @classmethod
    def from_json(cls, obj):
        ledger = [Condition(c["name"], c["value"], c["required"], c["satisfied"], c["set"])
                  for c in obj["ledger"]]
        return cls(tuple(obj["point"]), obj["verdict"], ledger, list(obj["order"]),
                   obj["method"], dict(obj.get("info", {})))


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return obj


# -- critical set -------------------------------------------------------------

@dataclass
class CriticalSetSample:
    """Points of {f(x, y, 0) = 0} chained into polylines, each tagged NH or not."""

    branches: list
    fx: list

    @property
    def nh(self) -> list:
        return [np.abs(d) >= ZETA for d in self.fx]

    def points(self) -> np.ndarray:
        if not self.branches:
            return np.empty((0, 2))
        return np.vstack(self.branches)

    def fx_values(self) -> np.ndarray:
        if not self.fx:
            return np.empty(0)
        return np.concatenate(self.fx)

    def non_nh_points(self) -> np.ndarray:
        pts, fx = self.points(), self.fx_values()
        return pts[np.abs(fx) < ZETA]

    def rows(self):
        """(branch, x, y, f_x, tag) rows for CSV export."""
        for b, (pts, d) in enumerate(zip(self.branches, self.fx)):
            for (x, y), v in zip(pts, d):
                yield b, float(x), float(y), float(v), ("NH" if abs(v) >= ZETA else "non-NH")

    def to_json(self) -> dict:
        return {"branches": [
            {"points": pts.tolist(), "fx": d.tolist(), "nh": (np.abs(d) >= ZETA).tolist()}
            for pts, d in zip(self.branches, self.fx)]}


def _bisect_vec(fn, lo, hi, flo, tol=BISECT_TOL):
    lo, hi, flo = lo.copy(), hi.copy(), flo.copy()
    while np.max(hi - lo, initial=0.0) > tol:
        mid = 0.5 * (lo + hi)
        fm = fn(mid)
        same = np.sign(fm) == np.sign(flo)
        lo = np.where(same, mid, lo)
        flo = np.where(same, fm, flo)
        hi = np.where(same, hi, mid)
        exact = fm == 0
        lo = np.where(exact, mid, lo)
        hi = np.where(exact, mid, hi)
    return 0.5 * (lo + hi)


def _scan_lines(F, fixed, free, along_x):
    """Zeros of F along lines of constant ``fixed`` sampled at ``free`` nodes."""
    if along_x:
        X, Y = np.meshgrid(free, fixed)
    else:
        Y, X = np.meshgrid(free, fixed)
    V = np.broadcast_to(F(X, Y), X.shape)
    pts = []
    zi = np.argwhere(V == 0)
    for i, j in zi:
        pts.append((X[i, j], Y[i, j]))
    a, b = V[:, :-1], V[:, 1:]
    idx = np.argwhere((a * b) < 0)
    if len(idx):
        i, j = idx[:, 0], idx[:, 1]
        c = fixed[i]
        lo, hi, flo = free[j], free[j + 1], a[i, j]
        if along_x:
            roots = _bisect_vec(lambda t: F(t, c), lo, hi, flo)
            pts.extend(zip(roots, c))
        else:
            roots = _bisect_vec(lambda t: F(c, t), lo, hi, flo)
            pts.extend(zip(c, roots))
    return pts


def _column_roots(sfs: SlowFastSystem, xc: float, ya: float, yb: float, n: int):
    """y with f(xc, y, 0) = 0, even-multiplicity roots included when f is polynomial."""
    try:
        fp = sfs.polynomials()[0].substitute({"eps": 0, "x": Fraction(xc)})
        col = fp.with_vars(("y",))
        return [r.root for r in isolate_roots(col, (Fraction(ya), Fraction(yb)))]
    except (NotPolynomial, ValueError):
        pass
    except IdenticallyZero:
        return list(np.linspace(ya, yb, n))
    ys = np.linspace(ya, yb, 20 * n)
    F = lambda y: np.broadcast_to(sfs.f0.evaluate({"x": np.full_like(y, xc), "y": y}), y.shape)
    pts = _scan_lines(lambda x, y: F(y), np.array([xc]), ys, along_x=True)
    return [p[0] for p in pts]


def _fold_partials(sfs):
    """(x, y) -> (f, f_x, f_y, f_xx, f_xy) at ε = 0."""
    try:
        fp = sfs.polynomials()[0]
    except NotPolynomial:
        def jets(x, y):
            j = eval_jet(sfs.f, {"x": x, "y": y, "eps": 0.0}, ("x", "y"))
            return j.value, j.d("x"), j.d("y"), j.d("x", "x"), j.d("x", "y")
        return jets
    fx = fp.derivative("x")
    evs = [_xy_evaluator(q) for q in (fp, fx, fp.derivative("y"), fx.derivative("x"), fx.derivative("y"))]
    return lambda x, y: tuple(float(ev(x, y)) for ev in evs)


def _newton_fold(sfs, x, y, window, iters=30, partials=None):
    """Solve f = f_x = 0 (ε = 0) from (x, y); None if it wanders off."""
    (xa, xb), (ya, yb) = window
    partials = partials or _fold_partials(sfs)
    for _ in range(iters):
        f, fx, fy, fxx, fxy = partials(x, y)
        J = np.array([[fx, fy], [fxx, fxy]])
        try:
            step = np.linalg.solve(J, np.array([f, fx]))
        except np.linalg.LinAlgError:
            return None
        x, y = x - step[0], y - step[1]
        if not (xa <= x <= xb and ya <= y <= yb):
            return None
        if np.max(np.abs(step)) < 1e-14:
            break
    f, fx = partials(x, y)[:2]
    if abs(f) < 1e-12 and abs(fx) < ZETA:
        return x, y
    return None


def _chain(points, radius):
    pts = np.asarray(points, dtype=float)
    n = len(pts)
    if n == 0:
        return []
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    pts = pts[order]
    used = np.zeros(n, dtype=bool)
    branches = []
    for start in range(n):
        if used[start]:
            continue
        used[start] = True
        branch = [start]
        for direction in (1, -1):
            cur = start
            while True:
                d = np.hypot(pts[:, 0] - pts[cur, 0], pts[:, 1] - pts[cur, 1])
                d[used] = np.inf
                k = int(np.argmin(d))
                if not d[k] <= radius:
                    break
                used[k] = True
                if direction == 1:
                    branch.append(k)
                else:
                    branch.insert(0, k)
                cur = k
        branches.append(pts[branch])
    return branches


def _dedupe(points, tol=1e-9):
    if not points:
        return []
    arr = np.array(points, dtype=float)
    keys = np.round(arr / tol).astype(np.int64)
    _, idx = np.unique(keys, axis=0, return_index=True)
    return arr[np.sort(idx)]


def critical_set(sfs: SlowFastSystem, window=((-1.0, 1.0), (-1.0, 1.0)), grid_n=101,
                 hint_x=None) -> CriticalSetSample:
    """Sample C0 = {f(x, y, 0) = 0} on ``window``.

    Sign changes along grid rows and columns are refined by bisection. The
    columns through the critical points of the system's transition function
    (and any ``hint_x``) are solved exactly so that tangential zeros are kept,
    and points where f_x changes sign along a branch are refined onto
    {f = f_x = 0}.
    """
    (xa, xb), (ya, yb) = window
    if sfs.chart is not None:
        xa, xb = max(xa, sfs.chart[0]), min(xb, sfs.chart[1])
    xs = np.linspace(xa, xb, grid_n)
    ys = np.linspace(ya, yb, grid_n)
    try:
        F = _xy_evaluator(sfs.polynomials()[0])
    except NotPolynomial:
        f0 = sfs.f0

        def F(x, y):
            return f0.evaluate({"x": x, "y": y})

    pts = _scan_lines(F, ys, xs, along_x=True) + _scan_lines(F, xs, ys, along_x=False)
    hints = list(hint_x or [])
    if sfs.tf is not None:
        hints += [t for t, _ in sfs.tf.critical_points() if xa <= t <= xb]
    for xc in hints:
        pts += [(xc, y) for y in _column_roots(sfs, xc, ya, yb, grid_n)]
    pts = _dedupe(pts)
    spacing = math.hypot((xb - xa) / (grid_n - 1), (yb - ya) / (grid_n - 1))
    branches = _chain(pts, 2 * spacing)
    fx_of = _fx_function(sfs)
    fxs = [fx_of(b) for b in branches]

    extra = []
    partials = _fold_partials(sfs)
    for b, d in zip(branches, fxs):
        flips = np.nonzero(np.sign(d[:-1]) * np.sign(d[1:]) < 0)[0]
        for k in flips:
            x0, y0 = 0.5 * (b[k] + b[k + 1])
            sol = _newton_fold(sfs, x0, y0, ((xa, xb), (ya, yb)), partials=partials)
            if sol is not None:
                extra.append(sol)
    if extra:
        pts = _dedupe(list(map(tuple, pts)) + extra)
        branches = _chain(pts, 2 * spacing)
        fxs = [fx_of(b) for b in branches]
    return CriticalSetSample(branches, fxs)


def _xy_evaluator(poly):
    """Vectorized (x, y) -> poly(x, y, 0) for a Polynomial over (x, y, eps)."""
    terms = [(float(c), i, j) for (i, j, k), c in poly.with_vars(SF_VARS).terms.items() if k == 0]

    def run(x, y):
        x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
        out = np.zeros(np.broadcast(x, y).shape)
        for c, i, j in terms:
            out = out + c * x ** i * y ** j
        return out
    return run


def _fx_function(sfs):
    """Vectorized f_x(x, y, 0) over an (n, 2) point array."""
    try:
        fx = _xy_evaluator(sfs.polynomials()[0].derivative("x"))
    except NotPolynomial:
        return lambda pts: np.array([_fx(sfs, x, y) for x, y in pts])
    return lambda pts: fx(np.asarray(pts, dtype=float)[:, 0], np.asarray(pts, dtype=float)[:, 1])


def _fx(sfs, x, y):
    return eval_jet(sfs.f, {"x": float(x), "y": float(y), "eps": 0.0}, ("x",)).d("x")


def polish_on_critical_set(sfs: SlowFastSystem, x: float, y: float, iters=20):
    """Newton in x at fixed y so that f(x, y, 0) vanishes to rounding."""
    for _ in range(iters):
        j = eval_jet(sfs.f, {"x": x, "y": y, "eps": 0.0}, ("x",))
        if j.value == 0 or j.d("x") == 0:
            break
        step = j.value / j.d("x")
        if abs(step) > 1e-6:
            break
        x -= step
        if abs(step) < 1e-17:
            break
    return x, y


# -- generic conditions -------------------------------------------------------

def classify_generic(sfs: SlowFastSystem, point, tol=ZETA, on_tol=None) -> SingularityReport:
    """Apply, in order, the NH, fold, transcritical and pitchfork conditions at ε = 0."""
    x0, y0 = float(point[0]), float(point[1])
    jf, jg = sfs.jets(x0, y0, 0.0)
    f = jf.value
    if abs(f) > (tol if on_tol is None else on_tol):
        raise NotOnCriticalSet(f"f = {f:.3g} at ({x0}, {y0})")
    fx, fy = jf.d("x"), jf.d("y")
    fxx, fxy, fyy, fxxx = jf.d("x", "x"), jf.d("x", "y"), jf.d("y", "y"), jf.d("x", "x", "x")
    g = jg.value
    det = fxx * fyy - fxy * fxy
    led = _Ledger(tol)
    led.add("normally_hyperbolic", "f_x", fx, "≠0")
    for name, v, req in (("f_x", fx, "=0"), ("f_xx", fxx, "≠0"), ("f_y", fy, "≠0"), ("g", g, "≠0")):
        led.add("sf_fold", name, v, req)
    for name, v, req in (("f", f, "=0"), ("f_x", fx, "=0"), ("f_y", fy, "=0"),
                         ("det_hess", det, "<0"), ("f_xx", fxx, "≠0"), ("g", g, "≠0")):
        led.add("sf_transcritical", name, v, req)
    for name, v, req in (("f", f, "=0"), ("f_x", fx, "=0"), ("f_xx", fxx, "=0"), ("f_y", fy, "=0"),
                         ("f_xxx", fxxx, "≠0"), ("f_xy", fxy, "≠0"), ("g", g, "≠0")):
        led.add("sf_pitchfork", name, v, req)
    partials = {"f": f, "f_x": fx, "f_y": fy, "f_xx": fxx, "f_xy": fxy, "f_yy": fyy,
                "f_xxx": fxxx, "g": g}
    return SingularityReport((x0, y0), led.verdict(), led.entries, led.order, "generic",
                             {"partials": partials})


# -- linear regularization ----------------------------------------------------

def _components_jets(psvf: PSVF, y0: float):
    point = {"x": 0.0, "y": float(y0)}
    return [eval_jet(e, point, ("y",)) for e in (psvf.f1, psvf.f2, psvf.g1, psvf.g2)]


def _sigma_values(psvf: PSVF, y0):
    """(f1, g1) at (0, y0), exact when the components are rational expressions."""
    try:
        env = {"x": Fraction(0), "y": Fraction(y0)}
        return psvf.f1.evaluate_exact(env), psvf.g1.evaluate_exact(env)
    except (NotPolynomial, TypeError, ValueError):
        return psvf.f1.evaluate({"x": 0.0, "y": float(y0)}), psvf.g1.evaluate({"x": 0.0, "y": float(y0)})


def fast_equilibria(psvf: PSVF, tf: TransitionFunction, y0) -> list:
    """x in (-1, 1) with (f1+g1) + φ(x)(f1-g1) = 0 at (0, y0).

    Critical points of φ whose value matches the level within ζ are included
    as well, so tangential solutions survive rounding in y0.
    """
    f1, g1 = _sigma_values(psvf, y0)
    S, D = f1 + g1, f1 - g1
    if abs(D) <= ZETA:
        return []
    level = -Fraction(S) / Fraction(D)
    c = [Fraction(a) for a in tf.coeffs]
    c[0] -= level
    roots = [r.root for r in isolate_roots(c, (-1, 1), closed=False)]
    for t, v in tf.critical_points():
        if abs(v - float(level)) > ZETA * max(1.0, abs(v)):
            continue
        roots = [r for r in roots if abs(r - t) > 1e-6] + [t]
    return sorted(set(roots))


def predict_linear(psvf: PSVF, tf: TransitionFunction, y0: float = 0.0, x0=None,
                   tol=ZETA) -> SingularityReport:
    """Conditions on (f1, g1, φ) for the blown-up linear regularization at (x0, y0)."""
    jf1, jf2, jg1, jg2 = _components_jets(psvf, y0)
    f1, g1, f2, g2 = jf1.value, jg1.value, jf2.value, jg2.value
    D, S = f1 - g1, f1 + g1
    roots = fast_equilibria(psvf, tf, y0)
    if x0 is None:
        if not roots:
            raise NoFastEquilibrium(f"no x in (-1, 1) with φ(x) = (g1+f1)/(g1-f1) at y = {y0}")
        x0 = min(roots, key=lambda t: (abs(tf.eval(t, 1)), abs(t)))
    x0 = float(x0)
    p0, p1, p2, p3 = (tf.eval(x0, k) for k in range(4))
    f1y, g1y = jf1.d("y"), jg1.d("y")
    f1yy, g1yy = jf1.d("y", "y"), jg1.d("y", "y")
    residual = S + p0 * D
    ycond = (f1y + g1y) + p0 * (f1y - g1y)
    det = 0.25 * D * p2 * 0.25 * ((1 + p0) * f1yy + (1 - p0) * g1yy)
    g = 0.5 * (f2 + g2) + 0.5 * p0 * (f2 - g2)

    led = _Ledger(tol)
    led.add("normally_hyperbolic", "f1-g1", D, "≠0")
    led.add("normally_hyperbolic", "phi'(x0)", p1, "≠0")
    common = (("f1-g1", D, "≠0"), ("phi'(x0)", p1, "=0"), ("phi''(x0)", p2, "≠0"),
              ("(f1+g1)+phi(x0)(f1-g1)", residual, "=0"))
    for name, v, req in common + (("y_condition", ycond, "≠0"), ("g", g, "≠0")):
        led.add("sf_fold", name, v, req)
    for name, v, req in common + (("y_condition", ycond, "=0"), ("det", det, "<0"), ("g", g, "≠0")):
        led.add("sf_transcritical", name, v, req)

    # pitchfork prerequisites f = f_x = f_xx = f_y = 0 on the blown-up system
    fx, fxx, fxxx = 0.5 * p1 * D, 0.5 * p2 * D, 0.5 * p3 * D
    Dy = f1y - g1y
    fxy = 0.5 * p1 * Dy
    fy = 0.5 * ycond
    for name, v in (("f", 0.5 * residual), ("f_x", fx), ("f_xx", fxx), ("f_y", fy)):
        led.add("impossible_linear_pitchfork", name, v, "=0")

    attempt = _Ledger(tol)
    for name, v, req in (("f_x", fx, "=0"), ("f_xx", fxx, "=0"), ("f_y", fy, "=0"),
                         ("f_xxx", fxxx, "≠0"), ("f_xy", fxy, "≠0"), ("g", g, "≠0")):
        attempt.add("pitchfork", name, v, req)
    identity = fxy * fxxx - fx * p3 * Dy / 2
    all_met = all(c.satisfied for c in attempt.entries)
    info = {
        "x0": x0, "fast_equilibria": roots,
        "phi": {"value": p0, "d1": p1, "d2": p2, "d3": p3},
        "pitchfork_attempt": {
            "ledger": [c.to_json() for c in attempt.entries],
            "identity": "f_xy*f_xxx = f_x*phi'''(x0)*(f1-g1)_y/2",
            "identity_residual": identity,
            "contradictory": not all_met,
        },
    }
    return SingularityReport((x0, float(y0)), led.verdict(), led.entries, led.order, "linear", info)


# -- nonlinear regularization -------------------------------------------------

def predict_nonlinear(fam: NonlinearFamily, tf: TransitionFunction, point=(0.0, 0.0),
                      tol=ZETA) -> SingularityReport:
    """Conditions on the family's partials in (L, y) at (φ(x0), 0, y0)."""
    if not tf.is_monotonic():
        raise NonMonotonicPhi("the nonlinear conditions assume a monotonic transition function")
    x0, y0 = float(point[0]), float(point[1])
    lam0 = tf.eval(x0)
    at = {"L": lam0, "x": 0.0, "y": y0}
    j = eval_jet(fam.z1, at, ("L", "y"))
    z2 = fam.z2.evaluate(at)
    v = {"Z1": j.value, "Z1_L": j.d("L"), "Z1_LL": j.d("L", "L"), "Z1_LLL": j.d("L", "L", "L"),
         "Z1_y": j.d("y"), "Z1_Ly": j.d("L", "y"), "Z1_yy": j.d("y", "y"), "Z2": float(z2)}
    disc = v["Z1_Ly"] ** 2 - v["Z1_LL"] * v["Z1_yy"]
    led = _Ledger(tol)
    led.add("normally_hyperbolic", "Z1_L", v["Z1_L"], "≠0")
    for name, req in (("Z1", "=0"), ("Z1_L", "=0"), ("Z1_LL", "≠0"), ("Z1_y", "≠0"), ("Z2", "≠0")):
        led.add("sf_fold", name, v[name], req)
    for name, req in (("Z1", "=0"), ("Z1_L", "=0"), ("Z1_LL", "≠0"), ("Z1_y", "=0"), ("Z2", "≠0")):
        led.add("sf_transcritical", name, v[name], req)
    led.add("sf_transcritical", "Z1_Ly^2-Z1_LL*Z1_yy", disc, ">0")
    for name, req in (("Z1", "=0"), ("Z1_L", "=0"), ("Z1_LL", "=0"), ("Z1_y", "=0"),
                      ("Z1_LLL", "≠0"), ("Z1_Ly", "≠0"), ("Z2", "≠0")):
        led.add("sf_pitchfork", name, v[name], req)
    info = {"phi(x0)": lam0, "phi'(x0)": tf.eval(x0, 1), "partials": v}
    return SingularityReport((x0, y0), led.verdict(), led.entries, led.order, "nonlinear", info)


# -- Theorem A style report ---------------------------------------------------

def _y_solutions(psvf: PSVF, level: float, interval, samples=4001):
    """y in ``interval`` with (f1+g1) + level·(f1-g1) = 0 at x = 0."""
    ya, yb = interval
    e = (psvf.f1 + psvf.g1) + (psvf.f1 - psvf.g1) * Fraction(level)
    e = e.substitute({"x": 0})
    try:
        p = to_polynomial(e, ("y",))
        return [r.root for r in isolate_roots(p, (Fraction(ya), Fraction(yb)))]
    except NotPolynomial:
        pass
    except IdenticallyZero:
        return list(np.linspace(ya, yb, 11))
    ys = np.linspace(ya, yb, samples)
    vals = np.broadcast_to(e.evaluate({"y": ys}), ys.shape)
    out = list(ys[vals == 0])
    idx = np.nonzero(vals[:-1] * vals[1:] < 0)[0]
    if len(idx):
        fn = lambda t: np.broadcast_to(e.evaluate({"y": t}), t.shape)
        out += list(_bisect_vec(fn, ys[idx], ys[idx + 1], vals[idx]))
    return sorted(out)


def theorem_a_report(psvf: PSVF, tf: TransitionFunction, y_interval=(-1.0, 1.0),
                     samples=201, grid_n=101) -> dict:
    sfs = blowup_linear(psvf, tf)
    ya, yb = y_interval

    # (a) critical points of φ give non-NH points of C0
    items = []
    for xc, phic in tf.critical_points():
        for y in _y_solutions(psvf, phic, y_interval):
            fx = _fx(sfs, xc, y)
            items.append({"x_c": xc, "phi": phic, "y": float(y), "f": float(sfs.f0.evaluate({"x": xc, "y": y})),
                          "f_x": fx, "non_nh": abs(fx) < ZETA})
    part_a = {"critical_points": [list(p) for p in tf.critical_points()], "points": items,
              "all_non_nh": all(i["non_nh"] for i in items)}

    # (b) overshoot and the projection of C0 meeting the sewing region
    over = tf.overshoot()
    lo = min([-1.0] + [v for _, v in tf.critical_points()])
    hi = max([1.0] + [v for _, v in tf.critical_points()])
    ys = np.linspace(ya, yb, samples)
    env = {"x": np.zeros_like(ys), "y": ys}
    f1, _, g1, _ = (np.broadcast_to(c, ys.shape) for c in psvf.components_at(env["x"], ys))
    S, D = f1 + g1, f1 - g1
    with np.errstate(divide="ignore", invalid="ignore"):
        level = np.where(np.abs(D) > ZETA, -S / D, np.nan)
    in_proj = np.where(np.abs(D) > ZETA, (level >= lo - ZETA) & (level <= hi + ZETA), np.abs(S) <= ZETA)
    sewing = (np.abs(f1) > ZETA) & (np.abs(g1) > ZETA) & (f1 * g1 > 0)
    filippov_sliding = (f1 < -ZETA) & (g1 > ZETA)
    witness = ys[in_proj & sewing]
    part_b = {"overshoot": over.to_json(), "phi_range": [lo, hi],
              "witness_y": witness.tolist(), "witness_nonempty": bool(len(witness)),
              "projection_fraction": float(np.mean(in_proj)),
              "filippov_sliding_fraction": float(np.mean(filippov_sliding)),
              "sigma_is_r_sliding": bool(np.all(in_proj))}

    # (c) slow flow on C0 against the sliding field
    zs = sliding_field(psvf)
    cs = critical_set(sfs, ((-1.0, 1.0), (ya, yb)), grid_n)
    errs = []
    for x, y in cs.points():
        d = psvf.components_at(0.0, float(y))
        if abs(d[0] - d[2]) <= 1e-3:
            continue
        x, y = polish_on_critical_set(sfs, float(x), float(y))
        slow = float(sfs.g0.evaluate({"x": x, "y": y}))
        ref = zs(y)
        errs.append(abs(slow - ref) / max(1.0, abs(ref)))
    part_c = {"samples": len(errs), "max_rel_error": max(errs) if errs else 0.0,
              "all_match": all(e <= 1e-9 for e in errs)}

    # (d) points of Π(C0) outside the sliding-field domain
    lines = []
    for y0 in _y_solutions(psvf, -1.0, y_interval):
        c = psvf.components_at(0.0, float(y0))
        Dv, Sv = c[0] - c[2], c[0] + c[2]
        if abs(Dv) > ZETA or abs(Sv) > ZETA:
            continue
        xs = np.linspace(-1.0, 1.0, 201)
        fvals = np.broadcast_to(sfs.f0.evaluate({"x": xs, "y": np.full_like(xs, y0)}), xs.shape)
        kind = classify_sigma_point(psvf, y0).kind
        lines.append({"y0": float(y0), "f1": c[0], "g1": c[2],
                      "line_in_c0": bool(np.max(np.abs(fvals)) < 1e-8),
                      "sigma_kind": kind})
    part_d = {"points": lines, "fires": any(p["line_in_c0"] for p in lines)}
    return {"a": part_a, "b": part_b, "c": part_c, "d": part_d}
