import math
import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from sfreg.errors import (
    EvaluationSingular, IdenticallyZero, NotPolynomial, ParseError, UnknownVariable,
)
from sfreg.expr import (
    Const, eval_jet, isolate_roots, parse_expr, squarefree_decomposition, to_polynomial, to_text,
)

from exprgen import VARS, FDOracle, multi_indices, random_expr

XYL = {"x", "y", "L"}


# -- parsing ------------------------------------------------------------------

def test_parse_cusp_component_has_two_terms():
    e = parse_expr("-y^2 + L", XYL)
    assert len(e.terms) == 2


def test_parse_pitchfork_family_has_two_terms():
    e = parse_expr("(x+L)*y + L^3", XYL)
    assert len(e.terms) == 2


def test_parse_zero_is_constant_zero():
    e = parse_expr("0", set())
    assert isinstance(e, Const) and e.value == 0


def test_parse_rational_literal():
    assert parse_expr("-1/2", set()).evaluate({}) == -0.5


@pytest.mark.parametrize("text,offset", [("x + * y", 4), ("(x + y", 6), ("x ^ y", 4), ("2 $ x", 2)])
def test_parse_error_reports_offset(text, offset):
    with pytest.raises(ParseError) as info:
        parse_expr(text, {"x", "y"})
    assert info.value.offset == offset


def test_unknown_variable():
    with pytest.raises(UnknownVariable) as info:
        parse_expr("x + z", {"x", "y"})
    assert info.value.name == "z"


@settings(max_examples=200, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_print_reparse_round_trip(seed):
    e = parse_expr(random_expr(random.Random(seed), depth=4), XYL)
    assert parse_expr(to_text(e), XYL) == e


# -- polynomials --------------------------------------------------------------

def test_to_polynomial_expanded_quintic():
    p = to_polynomial(parse_expr("x^2*(x-1)^2*(3*x+4)", {"x"}), ("x",))
    assert p.terms == {(5,): 3, (4,): -2, (3,): -5, (2,): 4}


def test_to_polynomial_matches_sympy_expand():
    text = "(x - 1/3)^3*(y + 2)^2 - x*y/7 + 5/2"
    mine = to_polynomial(parse_expr(text, {"x", "y"}), ("x", "y"))
    x, y = sympy.symbols("x y")
    ref = sympy.Poly(sympy.sympify(text.replace("^", "**")), x, y)
    expected = {k: Fraction(int(c.p), int(c.q)) for k, c in zip(ref.monoms(), ref.coeffs())}
    assert mine.terms == expected


def test_to_polynomial_rejects_exp():
    with pytest.raises(NotPolynomial):
        to_polynomial(parse_expr("exp(x)", {"x"}))


def test_to_polynomial_rejects_variable_denominator():
    with pytest.raises(NotPolynomial):
        to_polynomial(parse_expr("1/(1+x)", {"x"}))


def test_to_polynomial_zero():
    p = to_polynomial(parse_expr("1/2 - 1/2", set()))
    assert p.is_zero() and p.terms == {}


def test_polynomial_evaluation_matches_expression():
    rng = random.Random(7)
    checked = 0
    while checked < 100:
        text = random_expr(rng, depth=4, variables=("x", "y"))
        e = parse_expr(text, {"x", "y"})
        try:
            p = to_polynomial(e, ("x", "y"))
        except NotPolynomial:
            continue
        pt = {"x": rng.uniform(-2, 2), "y": rng.uniform(-2, 2)}
        a, b = p.evaluate(pt), e.evaluate(pt)
        assert abs(a - b) <= 1e-12 * max(1.0, abs(b))
        checked += 1


def test_exact_evaluation_agrees_with_polynomial():
    e = parse_expr("(x + 1/3)^4 - y/5", {"x", "y"})
    env = {"x": Fraction(2, 7), "y": Fraction(-3, 11)}
    assert e.evaluate_exact(env) == to_polynomial(e, ("x", "y")).evaluate(env)


# -- roots --------------------------------------------------------------------

def _coeffs(text):
    return to_polynomial(parse_expr(text, {"t"}), ("t",))


def test_roots_cusp_derivative():
    p = _coeffs("-3*t^5/2 + t^4 + 5*t^3/2 - 2*t^2 + 1").derivative("t")
    roots = isolate_roots(p, (-1, 1), closed=False)
    assert [r.root for r in roots] == pytest.approx([0.0, 8 / 15], abs=1e-12)


def test_roots_vi_derivative():
    roots = isolate_roots(_coeffs("-15*t^4/2 - 4*t^3 + 15*t^2/2 + 4*t"), (-1, 1), closed=False)
    assert [r.root for r in roots] == pytest.approx([-8 / 15, 0.0], abs=1e-12)


def test_roots_none():
    assert isolate_roots(_coeffs("t^2 + 1"), (-1, 1)) == []


def test_roots_identically_zero():
    with pytest.raises(IdenticallyZero):
        isolate_roots([Fraction(0)], (-1, 1))


def test_roots_multiplicity_and_width():
    # (t - 1/3)^2 (t + 1/2)^3 (t - sqrt(2)/2)
    x = sympy.Symbol("t")
    poly = sympy.Poly(sympy.expand((3 * x - 1) ** 2 * (2 * x + 1) ** 3 * (2 * x ** 2 - 1)), x)
    coeffs = [Fraction(int(c)) for c in reversed(poly.all_coeffs())]
    roots = isolate_roots(coeffs, (-1, 1))
    got = {round(r.root, 9): r.multiplicity for r in roots}
    assert got == {round(-math.sqrt(0.5), 9): 1, -0.5: 3, round(1 / 3, 9): 2,
                   round(math.sqrt(0.5), 9): 1}
    for r in roots:
        assert r.hi - r.lo < 1e-12


def test_isolating_intervals_bracket_sign_change():
    rng = random.Random(3)
    for _ in range(50):
        coeffs = [Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(rng.randint(2, 8))]
        if not any(coeffs[1:]):
            continue
        poly = sympy.Poly(list(reversed(coeffs)), sympy.Symbol("t"))
        for r in isolate_roots(coeffs, (-1, 1)):
            val = lambda t: sum(c * Fraction(t) ** k for k, c in enumerate(coeffs))
            if r.exact:
                assert val(r.lo) == 0
            elif r.multiplicity % 2:
                assert val(r.lo) * val(r.hi) <= 0
            assert any(abs(float(z) - r.root) < 1e-9 for z in sympy.real_roots(poly))


def test_squarefree_decomposition_product():
    # t^2 (t-1)^3
    coeffs = [Fraction(c) for c in (0, 0, -1, 3, -3, 1)]
    parts = squarefree_decomposition(coeffs)
    assert sorted(m for _, m in parts) == [2, 3]


# -- jets ---------------------------------------------------------------------

def test_jet_pitchfork_family_partials():
    j = eval_jet(parse_expr("(x+L)*y + L^3", XYL), {"L": 0.0, "x": 0.0, "y": 0.0}, ("L", "y"))
    assert (j.value, j.d("L"), j.d("L", "L"), j.d("y")) == (0, 0, 0, 0)
    assert j.d("L", "L", "L") == 6
    assert j.d("L", "y") == 1


def test_jet_identity():
    j = eval_jet(parse_expr("x", {"x"}), {"x": 0.37}, ("x",))
    assert j.value == 0.37 and j.d("x") == 1 and j.d("x", "x") == 0 and j.d("x", "x", "x") == 0


def test_jet_exp_matches_finite_differences():
    oracle = FDOracle("exp(x*y)", ("x", "y"))
    j = eval_jet(parse_expr("exp(x*y)", {"x", "y"}), {"x": 1.0, "y": 2.0}, ("x", "y"))
    for alpha in multi_indices(2):
        names = [v for v, k in zip(("x", "y"), alpha) for _ in range(k)]
        fd = oracle.partial((1.0, 2.0), alpha, h="1e-4")
        assert abs(j.d(*names) - fd) <= 1e-6 * abs(fd)


def test_jet_matches_sympy_derivatives():
    text = "exp(x/3)*(y - 2)^3/(1 + (x*y)^2) - L*x^2"
    syms = sympy.symbols(VARS)
    e = sympy.sympify(text.replace("^", "**"), locals=dict(zip(VARS, syms)))
    point = {"x": 0.3, "y": -0.7, "L": 1.1}
    j = eval_jet(parse_expr(text, XYL), point, VARS)
    for alpha in multi_indices(3):
        d = e
        for s, k in zip(syms, alpha):
            if k:
                d = sympy.diff(d, s, k)
        ref = float(d.subs({s: point[str(s)] for s in syms}))
        names = [v for v, k in zip(VARS, alpha) for _ in range(k)]
        assert j.d(*names) == pytest.approx(ref, rel=1e-12, abs=1e-12)


def test_jet_symmetric_mixed_partials():
    j = eval_jet(parse_expr("x^2*y^3*L", XYL), {"x": 0.5, "y": -1.5, "L": 2.0}, VARS)
    assert j.d("x", "y", "L") == j.d("L", "y", "x") == j.d("y", "L", "x")


def test_jet_division_by_zero():
    with pytest.raises(EvaluationSingular):
        eval_jet(parse_expr("1/x", {"x"}), {"x": 0.0}, ("x",))


def test_jet_rejects_fourth_order():
    j = eval_jet(parse_expr("x^4", {"x"}), {"x": 1.0}, ("x",))
    with pytest.raises(ValueError):
        j.d("x", "x", "x", "x")


def test_jet_richardson_corpus_sample():
    rng = random.Random(11)
    for _ in range(40):
        text = random_expr(rng)
        pt = [rng.uniform(-1, 1) for _ in VARS]
        j = eval_jet(parse_expr(text, XYL), dict(zip(VARS, pt)), VARS)
        oracle = FDOracle(text)
        for alpha in multi_indices(3):
            names = [v for v, k in zip(VARS, alpha) for _ in range(k)]
            fd = oracle.partial(pt, alpha)
            assert abs(j.d(*names) - fd) <= 1e-6 * max(1.0, abs(fd))
