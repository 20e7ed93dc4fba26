"""Deterministic corpus of (polynomial PSVF, transition function) pairs.

Half the corpus is random. The other half is built so that, at a chosen
point, f = f_x = f_xx = f_y = 0 and f_xxx != 0 on the blown-up linear system,
which is as close to a pitchfork as the linear construction allows.
"""
import random
from fractions import Fraction

import numpy as np

from sfreg.errors import SingularConstraintMatrix
from sfreg.expr import to_polynomial
from sfreg.psvf import PSVF
from sfreg.transition import TransitionConstraintSet, synthesize

POINT_POOL = [Fraction(k, 8) for k in range(-7, 8)]


def _rat(rng, lo=-3, hi=3, dens=(1, 1, 2, 3, 4)):
    return Fraction(rng.randint(lo * 4, hi * 4), 4 * rng.choice(dens))


def _text(q: Fraction) -> str:
    return f"({q.numerator}/{q.denominator})"


def random_poly(rng, degree=3, density=0.4, force=None) -> str:
    """Random polynomial in x, y of total degree <= degree as a string."""
    terms = dict(force or {})
    for i in range(degree + 1):
        for j in range(degree + 1 - i):
            if (i, j) not in terms and rng.random() < density:
                terms[(i, j)] = _rat(rng)
    parts = [f"{_text(c)}*x^{i}*y^{j}" for (i, j), c in sorted(terms.items()) if c != 0]
    return " + ".join(parts) if parts else "0"


def random_phi(rng, max_extra=4):
    while True:
        k = rng.randint(0, max_extra)
        pts = rng.sample(POINT_POOL, k)
        values, derivs, higher = [], [], []
        for p in pts:
            kind = rng.choice(("v", "d", "h"))
            if kind == "v":
                values.append((p, _rat(rng)))
            elif kind == "d":
                derivs.append((p, _rat(rng)))
            else:
                higher.append((rng.choice((2, 3)), p, _rat(rng)))
        try:
            return synthesize(TransitionConstraintSet(values, derivs, higher))
        except SingularConstraintMatrix:
            continue


def real_roots_in(coeffs_desc, lo=-1.0, hi=1.0):
    """Real roots of a float polynomial inside [lo, hi], numpy companion-matrix oracle."""
    c = np.trim_zeros(np.asarray(coeffs_desc, dtype=float), "f")
    if len(c) <= 1:
        return []
    r = np.roots(c)
    r = r[np.abs(r.imag) < 1e-9].real
    return sorted(float(v) for v in r if lo <= v <= hi)


def level_y_solutions(psvf: PSVF, level: float):
    """y in [-1, 1] with (f1+g1) + level*(f1-g1) = 0 at x = 0."""
    s = to_polynomial((psvf.f1 + psvf.g1 + (psvf.f1 - psvf.g1) * level).substitute({"x": 0}), ("y",))
    if s.is_zero():
        return None
    coeffs = [float(c) for c in s.coeffs()]
    return real_roots_in(coeffs[::-1])


def adversarial_pair(rng):
    """f = f_x = f_xx = f_y = 0 and f_xxx != 0 at (x0, 0)."""
    x0 = rng.choice([Fraction(k, 8) for k in range(-4, 5)])
    while True:
        v = _rat(rng)
        if v not in (1, -1):
            break
    d3 = _rat(rng, 1, 3) * rng.choice((-1, 1))
    tf = synthesize(TransitionConstraintSet([(x0, v)], [(x0, Fraction(0))],
                                            [(2, x0, Fraction(0)), (3, x0, d3)]))
    a0 = _rat(rng, 1, 3) * rng.choice((-1, 1))
    a1 = _rat(rng)
    c0 = -(1 + v) * a0 / (1 - v)
    c1 = -(1 + v) * a1 / (1 - v)
    f1 = random_poly(rng, force={(0, 0): a0, (0, 1): a1})
    g1 = random_poly(rng, force={(0, 0): c0, (0, 1): c1})
    f2 = random_poly(rng, force={(0, 0): _rat(rng, 1, 3)})
    g2 = random_poly(rng, force={(0, 0): _rat(rng, 1, 3)})
    psvf = PSVF.from_strings([f1, f2], [g1, g2])
    return psvf, tf, [(float(x0), 0.0)]


def random_pair(rng):
    psvf = PSVF.from_strings([random_poly(rng), random_poly(rng)], [random_poly(rng), random_poly(rng)])
    tf = random_phi(rng)
    points = []
    for xc, v in tf.critical_points():
        for y in level_y_solutions(psvf, v) or []:
            points.append((xc, y))
    y0 = float(rng.choice(POINT_POOL))
    f1 = psvf.f1.evaluate({"x": 0.0, "y": y0})
    g1 = psvf.g1.evaluate({"x": 0.0, "y": y0})
    if abs(f1 - g1) > 1e-6:
        level = -(f1 + g1) / (f1 - g1)
        c = [float(a) for a in tf.coeffs]
        c[0] -= level
        for x in real_roots_in(c[::-1], -1 + 1e-9, 1 - 1e-9):
            points.append((x, y0))
    return psvf, tf, points


def corpus(n, seed=20240611):
    """n pairs; even indices random, odd indices adversarial."""
    rng = random.Random(seed)
    out = []
    for i in range(n):
        psvf, tf, pts = adversarial_pair(rng) if i % 2 else random_pair(rng)
        out.append({"index": i, "kind": "adversarial" if i % 2 else "random",
                    "psvf": psvf, "tf": tf, "points": pts})
    return out
