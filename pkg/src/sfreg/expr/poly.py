"""Sparse multivariate polynomials with exact rational coefficients."""
from __future__ import annotations

from fractions import Fraction

from ..errors import NotPolynomial
from .nodes import Add, Const, Div, Exp, Expr, Mul, Neg, Pow, Var, add, mul, neg, power, sum_exprs

__all__ = ["Polynomial", "to_polynomial", "from_polynomial"]


class Polynomial:
    """Map from exponent tuples (aligned with ``vars``) to nonzero Fractions."""

    __slots__ = ("vars", "terms")

    def __init__(self, variables, terms=None):
        self.vars = tuple(variables)
        self.terms = {}
        for k, v in (terms or {}).items():
            v = Fraction(v)
            if v != 0:
                self.terms[tuple(k)] = v

    # construction
    @classmethod
    def constant(cls, c, variables=()):
        variables = tuple(variables)
        return cls(variables, {(0,) * len(variables): c})

    @classmethod
    def variable(cls, name, variables):
        variables = tuple(variables)
        exps = tuple(1 if v == name else 0 for v in variables)
        return cls(variables, {exps: 1})

    @classmethod
    def from_coeffs(cls, coeffs, name="t"):
        """Univariate polynomial from ascending coefficients."""
        return cls((name,), {(i,): c for i, c in enumerate(coeffs)})

    # inspection
    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        return max((sum(k) for k in self.terms), default=0)

    def degree_in(self, name) -> int:
        i = self.vars.index(name)
        return max((k[i] for k in self.terms), default=0)

    def coeffs(self):
        """Ascending coefficient list of a univariate polynomial."""
        if len(self.vars) > 1:
            used = [v for i, v in enumerate(self.vars) if any(k[i] for k in self.terms)]
            if len(used) > 1:
                raise ValueError("polynomial is not univariate")
            p = self.with_vars(used or self.vars[:1])
        else:
            p = self
        if not p.vars:
            return [p.terms.get((), Fraction(0))]
        n = p.degree()
        out = [Fraction(0)] * (n + 1)
        for k, v in p.terms.items():
            out[k[0]] = v
        return out

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        if self.vars != other.vars:
            names = sorted(set(self.vars) | set(other.vars))
            return self.with_vars(names).terms == other.with_vars(names).terms
        return self.terms == other.terms

    def __repr__(self):
        return f"Polynomial({self.vars}, {self.to_expr()})"

    # variable bookkeeping
    def with_vars(self, variables):
        variables = tuple(variables)
        index = {v: i for i, v in enumerate(variables)}
        out = {}
        for k, c in self.terms.items():
            e = [0] * len(variables)
            for name, p in zip(self.vars, k):
                if p:
                    if name not in index:
                        raise ValueError(f"variable {name} dropped while still used")
                    e[index[name]] = p
            out[tuple(e)] = c
        return Polynomial(variables, out)

    def _align(self, other):
        if isinstance(other, Polynomial):
            if other.vars == self.vars:
                return self, other
            names = tuple(self.vars) + tuple(v for v in other.vars if v not in self.vars)
            return self.with_vars(names), other.with_vars(names)
        return self, Polynomial.constant(other, self.vars)

    # arithmetic
    def __add__(self, other):
        a, b = self._align(other)
        out = dict(a.terms)
        for k, v in b.terms.items():
            out[k] = out.get(k, 0) + v
        return Polynomial(a.vars, out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.vars, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other if isinstance(other, Polynomial) else -Fraction(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        a, b = self._align(other)
        out = {}
        for ka, va in a.terms.items():
            for kb, vb in b.terms.items():
                k = tuple(x + y for x, y in zip(ka, kb))
                out[k] = out.get(k, 0) + va * vb
        return Polynomial(a.vars, out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise NotPolynomial("negative power of a polynomial")
        result = Polynomial.constant(1, self.vars)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def derivative(self, name):
        if name not in self.vars:
            return Polynomial(self.vars)
        i = self.vars.index(name)
        out = {}
        for k, v in self.terms.items():
            if k[i]:
                kk = list(k)
                kk[i] -= 1
                out[tuple(kk)] = v * k[i]
        return Polynomial(self.vars, out)

    def evaluate(self, env):
        """Evaluate at a point; exact when ``env`` holds Fractions."""
        inexact = any(isinstance(env[v], float) for v in self.vars if v in env)
        total = 0.0 if inexact else Fraction(0)
        for k, c in self.terms.items():
            term = float(c) if inexact else c
            for name, p in zip(self.vars, k):
                if p:
                    term = term * env[name] ** p
            total = total + term
        return total

    def substitute(self, mapping):
        """Compose: replace variables by polynomials (or rationals)."""
        names = [v for v in self.vars if v not in mapping]
        for rep in mapping.values():
            if isinstance(rep, Polynomial):
                names += [v for v in rep.vars if v not in names]
        result = Polynomial(names)
        cache = {}
        for k, c in self.terms.items():
            term = Polynomial.constant(c, names)
            for name, p in zip(self.vars, k):
                if not p:
                    continue
                if name in mapping:
                    key = (name, p)
                    if key not in cache:
                        rep = mapping[name]
                        rep = rep if isinstance(rep, Polynomial) else Polynomial.constant(rep, names)
                        cache[key] = rep.with_vars(names) ** p
                    term = term * cache[key]
                else:
                    term = term * Polynomial.variable(name, names) ** p
            result = result + term
        return result

    def to_expr(self) -> Expr:
        return from_polynomial(self)


def _poly_of(e: Expr, variables, memo):
    key = id(e)
    if key in memo:
        return memo[key]
    if isinstance(e, Const):
        out = Polynomial.constant(e.value, variables)
    elif isinstance(e, Var):
        out = Polynomial.variable(e.name, variables)
    elif isinstance(e, Add):
        out = Polynomial(variables)
        for t in e.terms:
            out = out + _poly_of(t, variables, memo)
    elif isinstance(e, Mul):
        out = Polynomial.constant(1, variables)
        for f in e.factors:
            out = out * _poly_of(f, variables, memo)
    elif isinstance(e, Neg):
        out = -_poly_of(e.arg, variables, memo)
    elif isinstance(e, Pow):
        if e.exponent < 0:
            raise NotPolynomial("negative exponent")
        out = _poly_of(e.base, variables, memo) ** e.exponent
    elif isinstance(e, Div):
        den = _poly_of(e.den, variables, memo)
        if den.degree() > 0 or den.is_zero():
            raise NotPolynomial("quotient with non-constant denominator")
        c = den.terms[(0,) * len(variables)]
        out = _poly_of(e.num, variables, memo) * (1 / c)
    elif isinstance(e, Exp):
        raise NotPolynomial("exp node")
    else:
        raise TypeError(f"unknown node {e!r}")
    memo[key] = out
    return out


def to_polynomial(e: Expr, variables=None) -> Polynomial:
    """Expand ``e`` into a :class:`Polynomial` over ``variables`` (default: its free variables, sorted)."""
    if variables is None:
        variables = sorted(e.free_vars())
    return _poly_of(e, tuple(variables), {})


def from_polynomial(p: Polynomial) -> Expr:
    """Canonical expression: monomials by descending total degree."""
    if p.is_zero():
        return Const(Fraction(0))
    items = sorted(p.terms.items(), key=lambda kv: (-sum(kv[0]), tuple(-x for x in kv[0])))
    terms = []
    for k, c in items:
        factors = []
        for name, n in zip(p.vars, k):
            if n == 1:
                factors.append(Var(name))
            elif n > 1:
                factors.append(power(Var(name), n))
        if not factors:
            terms.append(Const(c))
            continue
        mono = factors[0]
        for f in factors[1:]:
            mono = mul(mono, f)
        if c == 1:
            terms.append(mono)
        elif c == -1:
            terms.append(neg(mono))
        else:
            terms.append(mul(Const(c), mono))
    return sum_exprs(terms)
