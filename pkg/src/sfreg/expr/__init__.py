"""Expressions, exact polynomials, jets and real-root isolation."""
from .nodes import (
    Add, Const, Div, Exp, Expr, Expression, Mul, Neg, Pow, Var,
    add, as_expr, const, div, exp, mul, neg, parse_expr, power, sum_exprs, to_text, var,
)
from .poly import Polynomial, from_polynomial, to_polynomial
from .jet import Jet3, eval_jet
from .roots import RootInterval, isolate_roots, real_roots, squarefree_decomposition

__all__ = [
    "Add", "Const", "Div", "Exp", "Expr", "Expression", "Mul", "Neg", "Pow", "Var",
    "add", "as_expr", "const", "div", "exp", "mul", "neg", "parse_expr", "power",
    "sum_exprs", "to_text", "var",
    "Polynomial", "from_polynomial", "to_polynomial",
    "Jet3", "eval_jet",
    "RootInterval", "isolate_roots", "real_roots", "squarefree_decomposition",
]
