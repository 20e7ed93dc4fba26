"""Expression trees with exact rational constants.

Trees are immutable and built through small constructor helpers (:func:`add`,
:func:`mul`, ...) that fold constant operands and flatten sums and products.
The printer emits text that the parser maps back to the identical tree.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ..errors import EvaluationSingular, NotPolynomial, ParseError, UnknownVariable

__all__ = [
    "Expr", "Const", "Var", "Add", "Mul", "Neg", "Pow", "Div", "Exp",
    "add", "mul", "neg", "div", "power", "exp", "const", "var", "as_expr",
    "parse_expr", "to_text",
]


class Expr:
    __slots__ = ()

    def __add__(self, other):
        return add(self, as_expr(other))

    def __radd__(self, other):
        return add(as_expr(other), self)

    def __sub__(self, other):
        return add(self, neg(as_expr(other)))

    def __rsub__(self, other):
        return add(as_expr(other), neg(self))

    def __mul__(self, other):
        return mul(self, as_expr(other))

    def __rmul__(self, other):
        return mul(as_expr(other), self)

    def __truediv__(self, other):
        return div(self, as_expr(other))

    def __rtruediv__(self, other):
        return div(as_expr(other), self)

    def __neg__(self):
        return neg(self)

    def __pow__(self, n):
        return power(self, n)

    def __str__(self):
        return to_text(self)

    def free_vars(self) -> frozenset:
        out = set()
        stack = [self]
        while stack:
            node = stack.pop()
            if isinstance(node, Var):
                out.add(node.name)
            else:
                stack.extend(node.children())
        return frozenset(out)

    def children(self):
        return ()

    def evaluate(self, env):
        """Evaluate with floats or numpy arrays bound in ``env``."""
        return _evaluate(self, env, {})

    def evaluate_exact(self, env) -> Fraction:
        """Evaluate with exact rationals; ``exp`` nodes raise :class:`NotPolynomial`."""
        return _evaluate_exact(self, env)

    def substitute(self, mapping) -> "Expr":
        """Replace variables by expressions (or numbers) given in ``mapping``."""
        mapping = {k: as_expr(v) for k, v in mapping.items()}
        return _substitute(self, mapping, {})

    def size(self) -> int:
        return 1 + sum(c.size() for c in self.children())


@dataclass(frozen=True, slots=True)
class Const(Expr):
    value: Fraction


@dataclass(frozen=True, slots=True)
class Var(Expr):
    name: str


@dataclass(frozen=True, slots=True)
class Add(Expr):
    terms: tuple

    def children(self):
        return self.terms


@dataclass(frozen=True, slots=True)
class Mul(Expr):
    factors: tuple

    def children(self):
        return self.factors


@dataclass(frozen=True, slots=True)
class Neg(Expr):
    arg: Expr

    def children(self):
        return (self.arg,)


@dataclass(frozen=True, slots=True)
class Pow(Expr):
    base: Expr
    exponent: int

    def children(self):
        return (self.base,)


@dataclass(frozen=True, slots=True)
class Div(Expr):
    num: Expr
    den: Expr

    def children(self):
        return (self.num, self.den)


@dataclass(frozen=True, slots=True)
class Exp(Expr):
    arg: Expr

    def children(self):
        return (self.arg,)


Expression = Expr


# -- constructors -------------------------------------------------------------

def const(value) -> Const:
    return Const(Fraction(value))


def var(name: str) -> Var:
    return Var(name)


def as_expr(value) -> Expr:
    if isinstance(value, Expr):
        return value
    if isinstance(value, (int, Fraction)):
        return Const(Fraction(value))
    if isinstance(value, float):
        return Const(Fraction(value))
    raise TypeError(f"cannot convert {type(value).__name__} to an expression")


def add(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value + b.value)
    left = a.terms if isinstance(a, Add) else (a,)
    right = b.terms if isinstance(b, Add) else (b,)
    if isinstance(left[-1], Const) and isinstance(right[0], Const):
        left = left[:-1] + (Const(left[-1].value + right[0].value),)
        right = right[1:]
    terms = left + right
    return terms[0] if len(terms) == 1 else Add(terms)


def mul(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value * b.value)
    left = a.factors if isinstance(a, Mul) else (a,)
    right = b.factors if isinstance(b, Mul) else (b,)
    if isinstance(left[-1], Const) and isinstance(right[0], Const):
        left = left[:-1] + (Const(left[-1].value * right[0].value),)
        right = right[1:]
    factors = left + right
    return factors[0] if len(factors) == 1 else Mul(factors)


def neg(a: Expr) -> Expr:
    if isinstance(a, Const):
        return Const(-a.value)
    if isinstance(a, Neg):
        return a.arg
    if isinstance(a, Mul) and isinstance(a.factors[0], Const):
        return Mul((Const(-a.factors[0].value),) + a.factors[1:])
    return Neg(a)


def div(a: Expr, b: Expr) -> Expr:
    if isinstance(b, Const) and b.value == 0:
        raise EvaluationSingular("division by the constant zero")
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value / b.value)
    return Div(a, b)


def power(a: Expr, n: int) -> Expr:
    if not isinstance(n, int):
        raise TypeError("exponents must be integers")
    if isinstance(a, Const):
        if a.value == 0 and n < 0:
            raise EvaluationSingular("zero raised to a negative power")
        return Const(a.value ** n)
    return Pow(a, n)


def exp(a: Expr) -> Expr:
    return Exp(a)


def sum_exprs(items) -> Expr:
    items = list(items)
    if not items:
        return Const(Fraction(0))
    out = items[0]
    for item in items[1:]:
        out = add(out, item)
    return out


# -- evaluation ---------------------------------------------------------------

def _evaluate(e, env, memo):
    key = id(e)
    if key in memo:
        return memo[key]
    if isinstance(e, Const):
        out = float(e.value)
    elif isinstance(e, Var):
        try:
            out = env[e.name]
        except KeyError:
            raise UnknownVariable(e.name, env.keys()) from None
    elif isinstance(e, Add):
        out = _evaluate(e.terms[0], env, memo)
        for t in e.terms[1:]:
            out = out + _evaluate(t, env, memo)
    elif isinstance(e, Mul):
        out = _evaluate(e.factors[0], env, memo)
        for f in e.factors[1:]:
            out = out * _evaluate(f, env, memo)
    elif isinstance(e, Neg):
        out = -_evaluate(e.arg, env, memo)
    elif isinstance(e, Pow):
        base = _evaluate(e.base, env, memo)
        if e.exponent < 0:
            if np.isscalar(base) and base == 0:
                raise EvaluationSingular("zero raised to a negative power")
            out = 1.0 / base ** (-e.exponent)
        else:
            out = base ** e.exponent
    elif isinstance(e, Div):
        num = _evaluate(e.num, env, memo)
        den = _evaluate(e.den, env, memo)
        if np.isscalar(den):
            if den == 0:
                raise EvaluationSingular(f"denominator {to_text(e.den)} vanishes")
            out = num / den
        else:
            with np.errstate(divide="ignore", invalid="ignore"):
                out = num / den
    elif isinstance(e, Exp):
        arg = _evaluate(e.arg, env, memo)
        out = math.exp(arg) if isinstance(arg, float) else np.exp(arg)
    else:
        raise TypeError(f"unknown node {e!r}")
    memo[key] = out
    return out


def _evaluate_exact(e, env):
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Var):
        try:
            return Fraction(env[e.name])
        except KeyError:
            raise UnknownVariable(e.name, env.keys()) from None
    if isinstance(e, Add):
        return sum((_evaluate_exact(t, env) for t in e.terms), Fraction(0))
    if isinstance(e, Mul):
        out = Fraction(1)
        for f in e.factors:
            out *= _evaluate_exact(f, env)
        return out
    if isinstance(e, Neg):
        return -_evaluate_exact(e.arg, env)
    if isinstance(e, Pow):
        base = _evaluate_exact(e.base, env)
        if base == 0 and e.exponent < 0:
            raise EvaluationSingular("zero raised to a negative power")
        return base ** e.exponent
    if isinstance(e, Div):
        den = _evaluate_exact(e.den, env)
        if den == 0:
            raise EvaluationSingular(f"denominator {to_text(e.den)} vanishes")
        return _evaluate_exact(e.num, env) / den
    if isinstance(e, Exp):
        raise NotPolynomial("exp has no exact rational value")
    raise TypeError(f"unknown node {e!r}")


def _substitute(e, mapping, memo):
    key = id(e)
    if key in memo:
        return memo[key]
    if isinstance(e, Const):
        out = e
    elif isinstance(e, Var):
        out = mapping.get(e.name, e)
    elif isinstance(e, Add):
        out = sum_exprs(_substitute(t, mapping, memo) for t in e.terms)
    elif isinstance(e, Mul):
        parts = [_substitute(f, mapping, memo) for f in e.factors]
        out = parts[0]
        for p in parts[1:]:
            out = mul(out, p)
    elif isinstance(e, Neg):
        out = neg(_substitute(e.arg, mapping, memo))
    elif isinstance(e, Pow):
        out = power(_substitute(e.base, mapping, memo), e.exponent)
    elif isinstance(e, Div):
        out = div(_substitute(e.num, mapping, memo), _substitute(e.den, mapping, memo))
    elif isinstance(e, Exp):
        out = Exp(_substitute(e.arg, mapping, memo))
    else:
        raise TypeError(f"unknown node {e!r}")
    memo[key] = out
    return out


# -- printing -----------------------------------------------------------------

_SUM, _PROD, _UNARY, _POW, _ATOM = 1, 2, 3, 4, 5


def to_text(e: Expr) -> str:
    return _fmt(e)[0]


def _wrap(part, min_prec):
    text, prec = part
    return f"({text})" if prec < min_prec else text


def _fmt_const(v: Fraction):
    if v.denominator == 1:
        return str(v.numerator), (_ATOM if v >= 0 else _UNARY)
    return f"{v.numerator}/{v.denominator}", _PROD


def _fmt(e):
    if isinstance(e, Const):
        return _fmt_const(e.value)
    if isinstance(e, Var):
        return e.name, _ATOM
    if isinstance(e, Exp):
        return f"exp({to_text(e.arg)})", _ATOM
    if isinstance(e, Pow):
        base = _wrap(_fmt(e.base), _ATOM)
        n = e.exponent
        return (f"{base}^{n}" if n >= 0 else f"{base}^({n})"), _POW
    if isinstance(e, Neg):
        return "-" + _wrap(_fmt(e.arg), _UNARY), _UNARY
    if isinstance(e, Mul):
        parts = [_wrap(_fmt(e.factors[0]), _PROD)]
        for f in e.factors[1:]:
            parts.append(_wrap(_fmt(f), _POW if isinstance(f, Const) else _UNARY))
        return " * ".join(parts), _PROD
    if isinstance(e, Div):
        num = _wrap(_fmt(e.num), _PROD)
        den = _wrap(_fmt(e.den), _POW)
        return f"{num} / {den}", _PROD
    if isinstance(e, Add):
        out = _wrap(_fmt(e.terms[0]), _PROD)
        for t in e.terms[1:]:
            if isinstance(t, Neg):
                out += " - " + _wrap(_fmt(t.arg), _PROD)
            elif isinstance(t, Const) and t.value < 0:
                out += " - " + _fmt_const(-t.value)[0]
            elif isinstance(t, Mul) and isinstance(t.factors[0], Const) and t.factors[0].value < 0:
                out += " - " + _wrap(_fmt(neg(t)), _PROD)
            else:
                out += " + " + _wrap(_fmt(t), _PROD)
        return out, _SUM
    raise TypeError(f"unknown node {e!r}")


# -- parsing ------------------------------------------------------------------

_FUNCTIONS = {"exp": exp}


class _Parser:
    def __init__(self, text: str, variables):
        self.text = text
        self.vars = frozenset(variables)
        self.tokens = list(self._tokenize(text))
        self.pos = 0

    def _offset(self, index):
        return len(self.text[:index].encode("utf-8"))

    def _tokenize(self, text):
        i, n = 0, len(text)
        while i < n:
            ch = text[i]
            if ch.isspace():
                i += 1
            elif ch.isdigit():
                j = i
                while j < n and text[j].isdigit():
                    j += 1
                if j < n and text[j] in ".eE" and not (text[j] in "eE" and j + 1 < n and text[j + 1].isalpha()):
                    raise ParseError("only rational literals are accepted", self._offset(j))
                yield ("num", text[i:j], i)
                i = j
            elif ch.isalpha() or ch == "_":
                j = i
                while j < n and (text[j].isalnum() or text[j] == "_"):
                    j += 1
                yield ("name", text[i:j], i)
                i = j
            elif ch in "+-*/^()":
                yield ("op", ch, i)
                i += 1
            else:
                raise ParseError(f"unexpected character {ch!r}", self._offset(i))
        yield ("end", "", n)

    def peek(self):
        return self.tokens[self.pos]

    def take(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, value):
        kind, text, at = self.take()
        if text != value or kind != "op":
            raise ParseError(f"expected {value!r}", self._offset(at))

    def fail(self, message):
        raise ParseError(message, self._offset(self.peek()[2]))

    def parse(self):
        if self.peek()[0] == "end":
            self.fail("empty expression")
        node = self.expr()
        if self.peek()[0] != "end":
            self.fail(f"unexpected token {self.peek()[1]!r}")
        return node

    def expr(self):
        node = self.term()
        while self.peek()[:2] in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            rhs = self.term()
            node = add(node, rhs if op == "+" else neg(rhs))
        return node

    def term(self):
        node = self.unary()
        while self.peek()[:2] in (("op", "*"), ("op", "/")):
            op, at = self.take()[1:]
            rhs = self.unary()
            if op == "*":
                node = mul(node, rhs)
            else:
                try:
                    node = div(node, rhs)
                except EvaluationSingular:
                    raise ParseError("division by zero", self._offset(at)) from None
        return node

    def unary(self):
        if self.peek()[:2] == ("op", "-"):
            self.take()
            return neg(self.unary())
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[:2] == ("op", "^"):
            at = self.take()[2]
            n = self.exponent()
            try:
                return power(base, n)
            except EvaluationSingular:
                raise ParseError("zero raised to a negative power", self._offset(at)) from None
        return base

    def exponent(self):
        paren = self.peek()[:2] == ("op", "(")
        if paren:
            self.take()
        sign = 1
        if self.peek()[:2] == ("op", "-"):
            self.take()
            sign = -1
        kind, text, _ = self.peek()
        if kind != "num":
            self.fail("exponent must be an integer literal")
        self.take()
        if paren:
            self.expect(")")
        return sign * int(text)

    def atom(self):
        kind, text, at = self.take()
        if kind == "num":
            return Const(Fraction(int(text)))
        if kind == "name":
            if text in _FUNCTIONS and self.peek()[:2] == ("op", "("):
                self.take()
                inner = self.expr()
                self.expect(")")
                return _FUNCTIONS[text](inner)
            if text not in self.vars:
                raise UnknownVariable(text, self.vars)
            return Var(text)
        if (kind, text) == ("op", "("):
            inner = self.expr()
            self.expect(")")
            return inner
        if kind == "end":
            raise ParseError("unexpected end of input", self._offset(at))
        raise ParseError(f"unexpected token {text!r}", self._offset(at))


def parse_expr(text: str, variables) -> Expr:
    """Parse ``text`` over the declared ``variables``.

    Literals are integers or quotients of integers; ``^`` takes an integer
    exponent; ``exp(...)`` is the only function.
    """
    return _Parser(text, variables).parse()
