"""Truncated multivariate Taylor arithmetic up to total order 3.

A :class:`Jet3` stores Taylor coefficients c_α = ∂^α f / α! for every
multi-index with |α| ≤ 3, so each mixed partial is kept exactly once.
"""
from __future__ import annotations

import math
from functools import lru_cache
from itertools import combinations_with_replacement

from ..errors import EvaluationSingular, UnknownVariable
from .nodes import Add, Const, Div, Exp, Expr, Mul, Neg, Pow, Var

__all__ = ["Jet3", "eval_jet"]

ORDER = 3


@lru_cache(maxsize=None)
def _table(n: int):
    """Multi-indices of total degree ≤ 3 and the product table between them."""
    index = [(0,) * n]
    for deg in range(1, ORDER + 1):
        for combo in combinations_with_replacement(range(n), deg):
            alpha = [0] * n
            for i in combo:
                alpha[i] += 1
            index.append(tuple(alpha))
    pos = {a: i for i, a in enumerate(index)}
    products = []
    for i, a in enumerate(index):
        for j, b in enumerate(index):
            s = tuple(x + y for x, y in zip(a, b))
            if sum(s) <= ORDER:
                products.append((i, j, pos[s]))
    factorial = [math.prod(math.factorial(k) for k in a) for a in index]
    return tuple(index), pos, tuple(products), tuple(factorial)


class Jet3:
    """Value and partial derivatives up to order 3 in the variables ``wrt``."""

    __slots__ = ("wrt", "c")

    def __init__(self, wrt, coeffs):
        self.wrt = tuple(wrt)
        self.c = coeffs

    @classmethod
    def constant(cls, wrt, value):
        n = len(_table(len(wrt))[0])
        c = [0.0] * n
        c[0] = float(value)
        return cls(wrt, c)

    @classmethod
    def variable(cls, wrt, name, value):
        jet = cls.constant(wrt, value)
        alpha = tuple(1 if w == name else 0 for w in wrt)
        jet.c[_table(len(wrt))[1][alpha]] = 1.0
        return jet

    @property
    def value(self) -> float:
        return self.c[0]

    def partial(self, *names) -> float:
        """Partial derivative, e.g. ``jet.partial("L", "L", "y")``; no names gives the value."""
        if len(names) > ORDER:
            raise ValueError("jets carry derivatives up to order 3")
        alpha = [0] * len(self.wrt)
        for name in names:
            try:
                alpha[self.wrt.index(name)] += 1
            except ValueError:
                raise UnknownVariable(name, self.wrt) from None
        index, pos, _, fact = _table(len(self.wrt))
        k = pos[tuple(alpha)]
        return self.c[k] * fact[k]

    d = partial

    def partials(self) -> dict:
        """All partials keyed by the multi-index label, e.g. ``"LLy"``."""
        index, _, _, fact = _table(len(self.wrt))
        out = {}
        for k, alpha in enumerate(index):
            label = "".join(name * a for name, a in zip(self.wrt, alpha))
            out[label] = self.c[k] * fact[k]
        return out

    # arithmetic
    def _lift(self, other):
        if isinstance(other, Jet3):
            return other
        return Jet3.constant(self.wrt, other)

    def __add__(self, other):
        other = self._lift(other)
        return Jet3(self.wrt, [a + b for a, b in zip(self.c, other.c)])

    __radd__ = __add__

    def __neg__(self):
        return Jet3(self.wrt, [-a for a in self.c])

    def __sub__(self, other):
        other = self._lift(other)
        return Jet3(self.wrt, [a - b for a, b in zip(self.c, other.c)])

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, Jet3):
            s = float(other)
            return Jet3(self.wrt, [a * s for a in self.c])
        out = [0.0] * len(self.c)
        a, b = self.c, other.c
        for i, j, k in _table(len(self.wrt))[2]:
            out[k] += a[i] * b[j]
        return Jet3(self.wrt, out)

    __rmul__ = __mul__

    def _series(self, coeffs):
        """sum_k coeffs[k] h^k with h the non-constant part (h^4 vanishes)."""
        h = Jet3(self.wrt, [0.0] + self.c[1:])
        out = Jet3.constant(self.wrt, coeffs[0])
        hk = None
        for k in range(1, ORDER + 1):
            hk = h if hk is None else hk * h
            out = out + hk * coeffs[k]
        return out

    def reciprocal(self):
        a = self.c[0]
        if a == 0:
            raise EvaluationSingular("division by a jet with zero value")
        return self._series([1 / a, -1 / a**2, 1 / a**3, -1 / a**4])

    def __truediv__(self, other):
        if not isinstance(other, Jet3):
            if other == 0:
                raise EvaluationSingular("division by zero")
            return self * (1.0 / float(other))
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        return self.reciprocal() * float(other)

    def __pow__(self, n: int):
        if n < 0:
            return self.reciprocal() ** (-n)
        out = Jet3.constant(self.wrt, 1.0)
        base = self
        while n:
            if n & 1:
                out = out * base
            n >>= 1
            if n:
                base = base * base
        return out

    def exp(self):
        e = math.exp(self.c[0])
        return self._series([e, e, e / 2, e / 6])

    def __repr__(self):
        return f"Jet3({self.wrt}, {self.partials()})"


def eval_jet(e: Expr, point, wrt) -> Jet3:
    """Propagate jets through ``e`` at ``point`` (name -> float) in the variables ``wrt``."""
    wrt = tuple(wrt)
    memo = {}

    def walk(node):
        key = id(node)
        if key in memo:
            return memo[key]
        if isinstance(node, Const):
            out = Jet3.constant(wrt, node.value)
        elif isinstance(node, Var):
            if node.name not in point:
                raise UnknownVariable(node.name, point.keys())
            if node.name in wrt:
                out = Jet3.variable(wrt, node.name, point[node.name])
            else:
                out = Jet3.constant(wrt, point[node.name])
        elif isinstance(node, Add):
            out = walk(node.terms[0])
            for t in node.terms[1:]:
                out = out + walk(t)
        elif isinstance(node, Mul):
            out = walk(node.factors[0])
            for f in node.factors[1:]:
                out = out * walk(f)
        elif isinstance(node, Neg):
            out = -walk(node.arg)
        elif isinstance(node, Pow):
            out = walk(node.base) ** node.exponent
        elif isinstance(node, Div):
            out = walk(node.num) / walk(node.den)
        elif isinstance(node, Exp):
            out = walk(node.arg).exp()
        else:
            raise TypeError(f"unknown node {node!r}")
        memo[key] = out
        return out

    return walk(e)
