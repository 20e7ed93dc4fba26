"""Exact real-root isolation for univariate rational polynomials.

Square-free decomposition (Yun) followed by Sturm-sequence counting and
bisection. All arithmetic on coefficients and interval endpoints is exact.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from ..constants import ROOT_TOL
from ..errors import IdenticallyZero
from .poly import Polynomial

__all__ = ["RootInterval", "isolate_roots", "real_roots", "squarefree_decomposition"]


@dataclass(frozen=True)
class RootInterval:
    lo: Fraction
    hi: Fraction
    root: float
    multiplicity: int

    @property
    def exact(self) -> bool:
        return self.lo == self.hi


# -- dense univariate helpers (ascending Fraction lists) ----------------------

def _trim(p):
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return p


def _deriv(p):
    return [i * c for i, c in enumerate(p)][1:]


def _divmod(a, b):
    a = list(a)
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 1)
    lead = b[-1]
    while len(a) >= len(b) and a:
        c = a[-1] / lead
        shift = len(a) - len(b)
        q[shift] = c
        for i, bc in enumerate(b):
            a[shift + i] -= c * bc
        a.pop()
        a = _trim(a)
    return _trim(q), a


def _monic(p):
    lead = p[-1]
    return [c / lead for c in p]


def _gcd(a, b):
    a, b = _trim(a), _trim(b)
    while b:
        a, b = b, _divmod(a, b)[1]
    return _monic(a) if a else a


def _sub(a, b):
    n = max(len(a), len(b))
    return _trim([(a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(n)])


def _horner(p, x):
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def squarefree_decomposition(p):
    """Yun's algorithm: list of (factor, multiplicity) with square-free factors."""
    p = _monic(_trim(p))
    if len(p) <= 1:
        return []
    out = []
    dp = _deriv(p)
    a = _gcd(p, dp)
    b = _divmod(p, a)[0]
    c = _divmod(dp, a)[0]
    d = _sub(c, _deriv(b))
    k = 1
    while len(b) > 1:
        a = _gcd(b, d)
        if len(a) > 1:
            out.append((a, k))
        b = _divmod(b, a)[0]
        c = _divmod(d, a)[0]
        d = _sub(c, _deriv(b))
        k += 1
    return out


def _sturm(p):
    seq = [p, _deriv(p)]
    while len(seq[-1]) > 1:
        r = _divmod(seq[-2], seq[-1])[1]
        if not r:
            break
        seq.append([-c for c in r])
    return seq


def _variations(seq, x):
    count, last = 0, 0
    for q in seq:
        v = _horner(q, x)
        if v:
            s = 1 if v > 0 else -1
            if last and s != last:
                count += 1
            last = s
    return count


def _refine(p, lo, hi, tol):
    """Shrink (lo, hi) around the single simple root of ``p`` it contains."""
    flo = _horner(p, lo)
    if _horner(p, hi) == 0:
        return hi, hi
    # push lo off a neighbouring root by counting-free bisection from the right
    while flo == 0:
        mid = (lo + hi) / 2
        fm = _horner(p, mid)
        if fm == 0:
            return mid, mid
        if _sign_change(p, mid, hi):
            lo, flo = mid, fm
        else:
            hi = mid
    while hi - lo >= tol:
        mid = (lo + hi) / 2
        fm = _horner(p, mid)
        if fm == 0:
            return mid, mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return lo, hi


def _sign_change(p, a, b):
    fa, fb = _horner(p, a), _horner(p, b)
    return fa != 0 and fb != 0 and (fa > 0) != (fb > 0)


def _isolate_squarefree(q, a, b, tol):
    """Intervals (lo, hi] each holding one root of square-free ``q`` in (a, b]."""
    seq = _sturm(q)
    out = []
    stack = [(a, b, _variations(seq, a) - _variations(seq, b))]
    while stack:
        lo, hi, n = stack.pop()
        if n == 0:
            continue
        if n == 1:
            out.append(_refine(q, lo, hi, tol))
            continue
        mid = (lo + hi) / 2
        vm = _variations(seq, mid)
        stack.append((mid, hi, vm - _variations(seq, hi)))
        stack.append((lo, mid, _variations(seq, lo) - vm))
    return out


def _as_coeffs(p):
    if isinstance(p, Polynomial):
        return p.coeffs()
    return [Fraction(c) for c in p]


def isolate_roots(p, interval=(-1, 1), closed=True, tol=ROOT_TOL):
    """Isolate the distinct real roots of ``p`` in ``interval``.

    ``p`` is a univariate :class:`Polynomial` or an ascending coefficient list.
    With ``closed=False`` roots at the endpoints are excluded. Each result
    brackets one root in an interval narrower than ``tol`` (degenerate when the
    root is hit exactly) and carries its multiplicity.
    """
    coeffs = _trim(_as_coeffs(p))
    if not coeffs:
        raise IdenticallyZero("polynomial vanishes identically")
    a, b = Fraction(interval[0]), Fraction(interval[1])
    if a > b:
        raise ValueError("empty interval")
    tol = Fraction(tol)
    found = []
    for factor, mult in squarefree_decomposition(coeffs):
        if _horner(factor, a) == 0 and closed:
            found.append((a, a, mult))
        for lo, hi in _isolate_squarefree(factor, a, b, tol):
            if not closed and lo == hi == b:
                continue
            found.append((lo, hi, mult))
    found.sort(key=lambda r: r[0])
    return [RootInterval(lo, hi, float((lo + hi) / 2), m) for lo, hi, m in found]


def real_roots(p, interval=(-1, 1), closed=True):
    """Float roots only, ascending."""
    return [r.root for r in isolate_roots(p, interval, closed)]
