"""Numerical integration of slow-fast and planar systems, section maps and fold scaling."""
from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .. import _kernels
from ..errors import InsufficientSamples, NoFoldPassage, UnresolvableWidth
from ..expr import Expr, parse_expr
from ..regularize import SlowFastSystem
from .program import ProgramBuilder

__all__ = [
    "Section", "PlanarField", "Trajectory", "SectionMap", "FoldLandingFit", "ContractionTable",
    "integrate", "section_map", "fold_sections", "fold_landing_fit", "contraction_estimate",
    "DEFAULT_EPS_LIST", "write_csv",
]

DEFAULT_EPS_LIST = (1e-2, 10 ** -2.5, 1e-3, 10 ** -3.5, 1e-4)
REASONS = ("time_end", "section_hit", "chart_exit", "step_failure")
WIDTH_FLOOR = 1e-13
STIFF_COUNT = 8


@dataclass(frozen=True)
class Section:
    """The line x = c ('vertical') or y = c ('horizontal'), restricted on the free coordinate."""

    orientation: str
    c: float
    interval: tuple = (-math.inf, math.inf)

    def __post_init__(self):
        if self.orientation not in ("vertical", "horizontal"):
            raise ValueError("orientation must be 'vertical' or 'horizontal'")
        if not self.interval[0] <= self.interval[1]:
            raise ValueError("admissible interval is empty")

    @property
    def kind(self) -> int:
        return 1 if self.orientation == "vertical" else 2

    def point(self, s: float) -> tuple:
        """The point of the section with free coordinate s."""
        return (self.c, s) if self.orientation == "vertical" else (s, self.c)

    def free(self, x: float, y: float) -> float:
        return y if self.orientation == "vertical" else x

    def to_json(self) -> dict:
        return {"orientation": self.orientation, "c": self.c, "interval": list(self.interval)}


@dataclass(frozen=True)
class PlanarField:
    """ẋ = u(x, y), ẏ = v(x, y); no time-scale separation."""

    u: Expr
    v: Expr

    @classmethod
    def from_strings(cls, u: str, v: str) -> "PlanarField":
        names = {"x", "y"}
        return cls(parse_expr(u, names), parse_expr(v, names))


@dataclass
class Trajectory:
    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    reason: str
    eps: float
    n_steps: int = 0
    n_rejected: int = 0
    used_implicit: bool = False
    backend: str = _kernels.BACKEND

    @property
    def end(self) -> tuple:
        return float(self.x[-1]), float(self.y[-1])

    def rows(self):
        return [(float(t), float(x), float(y)) for t, x, y in zip(self.t, self.x, self.y)]

    def summary(self) -> dict:
        return {"reason": self.reason, "eps": self.eps, "t_end": float(self.t[-1]),
                "end": list(self.end), "n_samples": len(self.t), "n_steps": self.n_steps,
                "n_rejected": self.n_rejected, "used_implicit": self.used_implicit,
                "backend": self.backend}


@dataclass(frozen=True)
class _Compiled:
    p1: object
    p2: object
    consts: np.ndarray
    s1: float
    s2: float
    chart: tuple | None


def _compile(fld, eps: float, time_sign: float = 1.0) -> _Compiled:
    b = ProgramBuilder()
    if isinstance(fld, SlowFastSystem):
        p1, p2 = b.compile(fld.f), b.compile(fld.g)
        return _Compiled(p1, p2, b.constants(), time_sign / eps, time_sign, fld.chart)
    if isinstance(fld, PlanarField):
        p1, p2 = b.compile(fld.u), b.compile(fld.v)
        return _Compiled(p1, p2, b.constants(), time_sign, time_sign, None)
    raise TypeError(f"cannot integrate {type(fld).__name__}")


def _run(comp: _Compiled, start, eps, t_end, rtol, atol, section, chart, max_steps, record):
    if chart == "auto":
        chart = comp.chart
    ev = (section.kind, section.c, *section.interval) if section is not None else (0, 0.0, 0.0, 0.0)
    ch = (1, float(chart[0]), float(chart[1])) if chart is not None else (0, 0.0, 0.0)
    t, x, y, status, n_acc, n_rej, impl = _kernels.integrate(
        comp.p1.ops, comp.p1.args, comp.p2.ops, comp.p2.args, comp.consts, float(eps),
        comp.s1, comp.s2, float(start[0]), float(start[1]), float(t_end), float(rtol),
        float(atol), 0.0, int(max_steps), ev[0], float(ev[1]), float(ev[2]), float(ev[3]),
        ch[0], ch[1], ch[2], 1e-3 * float(eps), STIFF_COUNT, int(bool(record)))
    return Trajectory(np.asarray(t, dtype=float), np.asarray(x, dtype=float),
                      np.asarray(y, dtype=float), REASONS[status], float(eps), int(n_acc),
                      int(n_rej), bool(impl))


def _check_start(start, chart, comp):
    if chart == "auto":
        chart = comp.chart
    if chart is not None and not chart[0] <= start[0] <= chart[1]:
        raise ValueError(f"start x = {start[0]} lies outside the chart {tuple(chart)}")


def integrate(fld, start, eps, t_end, rtol=1e-8, atol=1e-10, section: Section | None = None,
              chart="auto", max_steps=1_000_000, record=True, time_sign=1.0) -> Trajectory:
    """Integrate from ``start`` until t_end, a section crossing, a chart exit or failure.

    For a SlowFastSystem the time is the slow time (ẋ = f/ε). ``chart`` is
    'auto' (the system's own chart), None, or an (x_lo, x_hi) pair.
    ``time_sign = -1`` integrates the reversed field.
    """
    if not eps > 0:
        raise ValueError("eps must be positive")
    comp = _compile(fld, eps, time_sign)
    _check_start(start, chart, comp)
    return _run(comp, start, eps, t_end, rtol, atol, section, chart, max_steps, record)


def _threads() -> int:
    env = os.environ.get("SFREG_THREADS")
    if env:
        return max(1, int(env))
    return min(4, os.cpu_count() or 1)


def _pool_map(fn, items):
    items = list(items)
    n = _threads()
    if n == 1 or len(items) < 2:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, items))


@dataclass
class SectionMap:
    eps: float
    pairs: list
    failures: list = field(default_factory=list)

    @property
    def exits(self) -> np.ndarray:
        return np.array([p[1] for p in self.pairs], dtype=float)

    def to_json(self) -> dict:
        return {"eps": self.eps, "pairs": [list(p) for p in self.pairs],
                "failures": [{"entry": s, "reason": r} for s, r in self.failures]}


def section_map(fld, eps, section_in: Section, section_out: Section, n_samples=11,
                t_end=50.0, rtol=1e-10, atol=1e-12, chart="auto", time_sign=1.0) -> SectionMap:
    """Map samples of the admissible interval of section_in to their first hit on section_out."""
    lo, hi = section_in.interval
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise ValueError("section_in needs a bounded admissible interval")
    comp = _compile(fld, eps, time_sign)
    entries = np.linspace(lo, hi, n_samples) if n_samples > 1 else np.array([0.5 * (lo + hi)])

    def one(s):
        start = section_in.point(float(s))
        _check_start(start, chart, comp)
        return _run(comp, start, eps, t_end, rtol, atol, section_out, chart, 10_000_000, False)

    pairs, failures = [], []
    for s, tr in zip(entries, _pool_map(one, entries)):
        if tr.reason == "section_hit":
            pairs.append((float(s), section_out.free(*tr.end)))
        else:
            failures.append((float(s), tr.reason))
    return SectionMap(float(eps), pairs, failures)


# -- fold passage --------------------------------------------------------------

def _sgn(v: float) -> float:
    return 1.0 if v > 0 else -1.0


def _fold_orientation(report) -> dict:
    p = report.info["partials"]
    a, b, g = p["f_xx"], p["f_y"], p["g"]
    s_t = _sgn(a * b * g)
    return {"time_sign": s_t, "s_x": -_sgn(s_t * a), "sigma_y": -_sgn(a * b),
            "f_xx": a, "f_y": b, "g": g}


def _branch_x(sfs: SlowFastSystem, x_guess: float, y: float, s_x: float, x0: float) -> float:
    """Newton on f(x, y, 0) = 0 from x_guess; must stay on the side s_x of x0."""
    x = x_guess
    for _ in range(60):
        jf = sfs.jets(x, y, 0.0, ("x",))[0]
        fx = jf.d("x")
        if fx == 0.0:
            break
        step = jf.value / fx
        x -= step
        if abs(step) < 1e-15 * max(1.0, abs(x)):
            break
    if not math.isfinite(x) or _sgn(x - x0) != s_x or abs(sfs.evaluate(x, y)[0]) > 1e-9:
        raise NoFoldPassage(f"no attracting critical branch near x = {x_guess:.6g} at y = {y:.6g}")
    return float(x)


def fold_sections(sfs: SlowFastSystem, fold_point, rho=0.3, spread=0.5):
    """Entry and exit sections around a verified fold, and the orientation used.

    Δin is the horizontal line at distance ρ² from the fold on the side of the
    attracting branch; its admissible interval is the branch abscissa ± spread·ρ.
    Δout is the vertical line at distance ρ on the far side of the fold.
    """
    from ..sfgeom import classify_generic

    report = classify_generic(sfs, fold_point)
    if report.verdict != "sf_fold":
        raise NoFoldPassage(f"point {tuple(fold_point)} is {report.verdict}, not sf_fold")
    o = _fold_orientation(report)
    x0, y0 = report.point
    y_in = y0 + o["sigma_y"] * rho * rho
    guess = x0 + o["s_x"] * rho * math.sqrt(2 * abs(o["f_y"]) / abs(o["f_xx"]))
    xb = _branch_x(sfs, guess, y_in, o["s_x"], x0)
    d_in = Section("horizontal", y_in, (xb - spread * rho, xb + spread * rho))
    d_out = Section("vertical", x0 - o["s_x"] * rho)
    o.update({"fold_point": [x0, y0], "rho": rho, "branch_x": xb})
    return d_in, d_out, o


@dataclass
class FoldLandingFit:
    rows: list
    exponent: float
    intercept: float
    r2: float
    orientation: dict

    def to_json(self) -> dict:
        return {"table": [dict(zip(("eps", "h", "y_exit", "reason"), r)) for r in self.rows],
                "exponent": self.exponent, "intercept": self.intercept, "r2": self.r2,
                "orientation": _plain(self.orientation)}


def _plain(d):
    return {k: (float(v) if isinstance(v, (np.floating, float)) else v) for k, v in d.items()}


def _check_eps_list(eps_list):
    eps_list = [float(e) for e in eps_list]
    if len(eps_list) < 5:
        raise InsufficientSamples(f"need at least 5 values of eps, got {len(eps_list)}")
    if any(not e > 0 for e in eps_list):
        raise ValueError("eps values must be positive")
    return eps_list


def fold_landing_fit(sfs: SlowFastSystem, fold_point, rho=0.3, eps_list=DEFAULT_EPS_LIST,
                     rtol=1e-10, atol=1e-12, t_end=None) -> FoldLandingFit:
    """Exit ordinate h(ε) = y_exit − y0 on Δout and the slope of log|h| against log ε."""
    eps_list = _check_eps_list(eps_list)
    d_in, d_out, o = fold_sections(sfs, fold_point, rho)
    start = (o["branch_x"], d_in.c)
    y0 = o["fold_point"][1]
    if t_end is None:
        t_end = 20.0 * (rho * rho + 1.0) / max(abs(o["g"]), 1e-12)

    def one(eps):
        return integrate(sfs, start, eps, t_end, rtol, atol, section=d_out, record=False,
                         time_sign=o["time_sign"])

    rows = []
    for eps, tr in zip(eps_list, _pool_map(one, eps_list)):
        if tr.reason != "section_hit":
            raise NoFoldPassage(f"eps = {eps:.3g}: orbit ended with {tr.reason} before Δout")
        y_exit = tr.end[1]
        rows.append((eps, y_exit - y0, y_exit, tr.reason))
    le = np.log([r[0] for r in rows])
    lh = np.log([abs(r[1]) for r in rows])
    slope, intercept = np.polyfit(le, lh, 1)
    resid = lh - (slope * le + intercept)
    ss_tot = float(np.sum((lh - lh.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid ** 2)) / ss_tot if ss_tot > 0 else 1.0
    o["delta_in"] = d_in.to_json()
    o["delta_out"] = d_out.to_json()
    return FoldLandingFit(rows, float(slope), float(intercept), r2, o)


@dataclass
class ContractionTable:
    rows: list
    superlinear: bool
    resolved: int

    def to_json(self) -> dict:
        keys = ("eps", "width", "eps_log_width", "below_resolution", "failures")
        return {"table": [dict(zip(keys, r)) for r in self.rows],
                "eps_log_width_strictly_decreasing": self.superlinear,
                "resolved": self.resolved}


def contraction_estimate(fld, eps_list, section_in: Section, section_out: Section,
                         n_samples=11, t_end=50.0, rtol=1e-12, atol=1e-14, chart="auto",
                         time_sign=1.0) -> ContractionTable:
    """Width of the image of section_in on section_out for each ε.

    Widths under 1e-13 are flagged below resolution and excluded from the
    monotonicity test on ε·log(width), taken in the order of ``eps_list``.
    """
    rows = []
    for eps in eps_list:
        sm = section_map(fld, eps, section_in, section_out, n_samples, t_end, rtol, atol,
                         chart, time_sign)
        ex = sm.exits
        width = float(ex.max() - ex.min()) if len(ex) > 1 else math.nan
        below = not width >= WIDTH_FLOOR
        elw = float(eps * math.log(width)) if not below else None
        rows.append((float(eps), width, elw, below, len(sm.failures)))
    vals = [r[2] for r in rows if not r[3]]
    if not vals:
        raise UnresolvableWidth("every image width is below float resolution")
    strictly = all(b < a for a, b in zip(vals, vals[1:]))
    return ContractionTable(rows, strictly, len(vals))


def write_csv(path, header, rows):
    """CSV with a header row and floats at full precision."""
    def fmt(v):
        if isinstance(v, (float, np.floating)):
            return "%.17g" % v
        return "" if v is None else str(v)

    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for r in rows:
            w.writerow([fmt(v) for v in r])
