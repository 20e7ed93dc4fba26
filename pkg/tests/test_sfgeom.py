from fractions import Fraction

import numpy as np
import pytest
import sympy

from sfreg.constants import ZETA
from sfreg.errors import NoFastEquilibrium, NonMonotonicPhi, NotOnCriticalSet
from sfreg.expr import eval_jet
from sfreg.psvf import PSVF
from sfreg.regularize import NonlinearFamily, SlowFastSystem, blowup_linear, blowup_nonlinear
from sfreg import registry
from sfreg.sfgeom import (
    SingularityReport, classify_generic, critical_set, fast_equilibria, predict_linear,
    predict_nonlinear, theorem_a_report,
)
from sfreg.transition import TransitionConstraintSet, TransitionFunction, synthesize

CUBIC = synthesize(TransitionConstraintSet())
OMEGA1 = synthesize(TransitionConstraintSet(values=[(0, 1)]))
OMEGA3 = synthesize(TransitionConstraintSet(values=[(0, 3)]))
CUSP_PHI = synthesize(TransitionConstraintSet(values=[(0, 1)], derivs=[(0, 0)]))
VI_PHI = synthesize(TransitionConstraintSet(values=[(0, -1)], derivs=[(0, 0)]))
PITCH_PHI = TransitionFunction.from_expr("-t^5/2 + t^3/2 + t")
SEWING = PSVF.from_strings(["1", "0"], ["2", "0"])
PITCH = NonlinearFamily.from_strings(["(x + L)*y + L^3", "-1"], X=["(x+1)*y + 1", "-1"],
                                     Y=["(x-1)*y - 1", "-1"])

X, Y = sympy.symbols("x y")


def smooth(f, g="1"):
    return SlowFastSystem.from_strings(f, g)


# -- generic conditions -------------------------------------------------------

@pytest.mark.parametrize("f, g, verdict", [
    ("x", "1", "normally_hyperbolic"),
    ("y + x^2", "1", "sf_fold"),
    ("x^2 - y^2", "1", "sf_transcritical"),
    ("x*(y - x^2)", "1", "sf_pitchfork"),
    ("y + x^2", "0", "degenerate"),
    ("x^3 + y^2", "1", "degenerate"),
])
def test_generic_normal_forms(f, g, verdict):
    rep = classify_generic(smooth(f, g), (0.0, 0.0))
    assert rep.verdict == verdict
    assert rep.recompute() == verdict


def test_generic_partials_match_sympy():
    text = "y*(1 + x) + x^2 - x^3/3 + x*y^2"
    expr = sympy.sympify(text.replace("^", "**"))
    rep = classify_generic(smooth(text), (0.0, 0.0))
    p = rep.info["partials"]
    for name, d in (("f_x", (X,)), ("f_y", (Y,)), ("f_xx", (X, X)), ("f_xy", (X, Y)),
                    ("f_yy", (Y, Y)), ("f_xxx", (X, X, X))):
        assert p[name] == float(sympy.diff(expr, *d).subs({X: 0, Y: 0}))


def test_not_on_critical_set():
    with pytest.raises(NotOnCriticalSet):
        classify_generic(smooth("x + 1/2"), (0.0, 0.0))


def test_report_json_round_trip():
    rep = classify_generic(smooth("x^2 - y^2"), (0.0, 0.0))
    again = SingularityReport.from_json(rep.to_json())
    assert again.verdict == rep.verdict and again.ledger == rep.ledger
    assert again.recompute() == rep.verdict
    assert rep.value("det_hess") == pytest.approx(-4.0)


def test_recompute_with_looser_tolerance_changes_verdict():
    rep = classify_generic(smooth("x/1000000 + y + x^2"), (0.0, 0.0))
    assert rep.verdict == "normally_hyperbolic"
    assert rep.recompute(tol=1e-5) == "sf_fold"


# -- critical set -------------------------------------------------------------

def test_critical_set_invariants_on_circle():
    cs = critical_set(smooth("x^2 + y^2 - 1/4"))
    pts, fx = cs.points(), cs.fx_values()
    assert len(pts) > 100
    assert np.all(np.abs(np.hypot(pts[:, 0], pts[:, 1]) - 0.5) < 1e-8)
    assert np.allclose(fx, 2 * pts[:, 0])
    folds = cs.non_nh_points()
    assert len(folds) >= 2
    for target in (0.5, -0.5):
        assert np.min(np.hypot(folds[:, 0], folds[:, 1] - target)) < 1e-9


def test_critical_set_tags_follow_fx():
    sfs = blowup_linear(PSVF.from_strings(["-y^2 + 1/10", "1"], ["1", "1"]), CUSP_PHI)
    cs = critical_set(sfs)
    for (x, y), d in zip(cs.points(), cs.fx_values()):
        j = eval_jet(sfs.f, {"x": x, "y": y, "eps": 0.0}, ("x",))
        assert abs(j.value) < 1e-8
        assert d == pytest.approx(j.d("x"), abs=1e-12)
    for tags, d in zip(cs.nh, cs.fx):
        assert np.array_equal(tags, np.abs(d) >= ZETA)


def test_sewing_omega3_critical_set_is_vertical_lines():
    cs = critical_set(blowup_linear(SEWING, OMEGA3))
    quartic = -3 * X / 4 + 3 * X ** 2 + X ** 3 / 4 - 3 * X ** 4 / 2
    roots = [float(r) for r in sympy.real_roots(sympy.Poly(quartic, X)) if -1 <= r <= 1]
    assert any(r == 0 for r in roots) and len(roots) >= 2
    xs = cs.points()[:, 0]
    assert all(np.min(np.abs(roots - x)) < 1e-9 for x in xs)
    for r in roots:
        assert np.sum(np.abs(xs - r) < 1e-9) >= 50
    assert len(cs.non_nh_points()) == 0


def test_single_nh_branch():
    cs = critical_set(smooth("x"))
    assert len(cs.branches) == 1
    assert np.all(np.abs(cs.points()[:, 0]) < 1e-12)
    assert all(t.all() for t in cs.nh)


def test_pitchfork_critical_set_shape():
    sfs = blowup_nonlinear(PITCH, PITCH_PHI)
    cs = critical_set(sfs)
    pts = cs.points()
    phi = PITCH_PHI.eval(pts[:, 0])
    on_line = np.abs(pts[:, 0]) < 1e-9
    on_parabola = np.abs(pts[:, 1] + phi ** 2) < 1e-8
    assert np.all(on_line | on_parabola)
    assert on_line.sum() > 50 and (on_parabola & ~on_line).sum() > 50
    assert np.min(np.hypot(*cs.non_nh_points().T)) < 1e-9


def test_critical_set_rows_and_json():
    cs = critical_set(smooth("y + x^2"), grid_n=41)
    rows = list(cs.rows())
    assert len(rows) == len(cs.points())
    assert {r[4] for r in rows} <= {"NH", "non-NH"}
    obj = cs.to_json()
    assert sum(len(b["points"]) for b in obj["branches"]) == len(rows)


# -- predictions from the PSVF ------------------------------------------------

def test_predict_cusp_origin_transcritical():
    psvf = PSVF.from_strings(["-y^2 + lam", "1"], ["1", "1"], {"lam": "0"})
    rep = predict_linear(psvf, CUSP_PHI, 0.0, 0.0)
    assert rep.verdict == "sf_transcritical"
    assert rep.info["pitchfork_attempt"]["contradictory"]


@pytest.mark.parametrize("lam", ["-1/10", "1/10"])
def test_predict_persistent_cusp_transcritical(lam):
    lv = Fraction(lam)
    tf = synthesize(TransitionConstraintSet(values=[(0, (1 + lv) / (1 - lv))], derivs=[(0, 0)]))
    psvf = PSVF.from_strings(["-y^2 + lam", "1"], ["1", "1"], {"lam": lam})
    assert predict_linear(psvf, tf, 0.0, 0.0).verdict == "sf_transcritical"


def test_predict_nh_fold():
    psvf = PSVF.from_strings(["y", "1"], ["1", "0"])
    q = Fraction(3, 8) * (Fraction(3, 8) - 1) ** 2 * (2 * Fraction(3, 8) + 3)
    y0 = q / (4 + q)
    assert y0 == Fraction(1125, 9317)
    rep = predict_linear(psvf, OMEGA1, float(y0), 3 / 8)
    assert rep.verdict == "sf_fold"
    sfs = blowup_linear(psvf, OMEGA1)
    assert classify_generic(sfs, (3 / 8, float(y0)), on_tol=1e-12).verdict == "sf_fold"


def test_fast_equilibria_and_missing_case():
    # the level (f1+g1)/(g1-f1) = -3 lies outside the range of the cubic
    assert fast_equilibria(SEWING, CUBIC, 0.0) == []
    quartic = -3 * X / 4 + 3 * X ** 2 + X ** 3 / 4 - 3 * X ** 4 / 2
    ref = [float(r) for r in sympy.real_roots(sympy.Poly(quartic, X)) if -1 < r < 1]
    assert fast_equilibria(SEWING, OMEGA3, 0.0) == pytest.approx(sorted(ref), abs=1e-12)
    with pytest.raises(NoFastEquilibrium):
        predict_linear(SEWING, CUBIC, 0.0)


def test_monotone_linear_case_is_nh():
    psvf = PSVF.from_strings(["-1", "y"], ["1", "y"])
    rep = predict_linear(psvf, CUBIC, 0.2)
    assert rep.point[0] == pytest.approx(0.0, abs=1e-15)
    assert rep.verdict == "normally_hyperbolic"


def test_pitchfork_attempt_reports_identity():
    rep = predict_linear(PSVF.from_strings(["-y^2", "1"], ["1", "1"]), CUSP_PHI, 0.0, 0.0)
    att = rep.info["pitchfork_attempt"]
    assert att["contradictory"]
    assert abs(att["identity_residual"]) < 1e-12


def test_predict_nonlinear_pitchfork_ledger():
    rep = predict_nonlinear(PITCH, PITCH_PHI)
    assert rep.verdict == "sf_pitchfork"
    assert rep.value("Z1_LLL", "sf_pitchfork") == pytest.approx(6.0)
    assert rep.value("Z1_Ly", "sf_pitchfork") == pytest.approx(1.0)
    assert rep.value("Z2", "sf_pitchfork") == pytest.approx(-1.0)
    gen = classify_generic(blowup_nonlinear(PITCH, PITCH_PHI), (0.0, 0.0))
    assert gen.verdict == "sf_pitchfork"


def test_predict_nonlinear_nh_and_fold():
    nh = NonlinearFamily.from_strings(["L", "1"])
    assert predict_nonlinear(nh, PITCH_PHI).verdict == "normally_hyperbolic"
    fold = NonlinearFamily.from_strings(["L^2 + y", "1"])
    assert predict_nonlinear(fold, PITCH_PHI).verdict == "sf_fold"
    sfs = blowup_nonlinear(fold, PITCH_PHI)
    assert classify_generic(sfs, (0.0, 0.0)).verdict == "sf_fold"


def test_predict_nonlinear_requires_monotone_phi():
    with pytest.raises(NonMonotonicPhi):
        predict_nonlinear(PITCH, CUSP_PHI)


def test_predictions_agree_with_generic_across_registry():
    checked = 0
    for rec in registry.load_all():
        if rec.kind != "linear":
            continue
        for params in rec.param_sets():
            psvf, tf = rec.psvf(params), rec.phi(params)
            sfs = blowup_linear(psvf, tf)
            for y0 in (0.0, 0.5, -0.25):
                for x0 in fast_equilibria(psvf, tf, y0):
                    a = predict_linear(psvf, tf, y0, x0).verdict
                    b = classify_generic(sfs, (x0, y0), on_tol=1e-9).verdict
                    assert a == b, (rec.id, params, y0, x0)
                    checked += 1
    assert checked >= 20


# -- set-level report ---------------------------------------------------------

def test_theorem_a_sewing_omega3():
    rep = theorem_a_report(SEWING, OMEGA3)
    assert rep["b"]["overshoot"]["exceeds_one"]
    assert rep["b"]["sigma_is_r_sliding"] and rep["b"]["witness_nonempty"]
    assert rep["b"]["filippov_sliding_fraction"] == 0.0


def test_theorem_a_cubic_has_no_critical_points():
    rep = theorem_a_report(SEWING, CUBIC)
    assert rep["a"]["points"] == [] and rep["a"]["all_non_nh"]
    assert not rep["b"]["overshoot"]["exceeds_one"]


def test_theorem_a_vi_line_in_critical_set():
    psvf = PSVF.from_strings(["2*y + lam", "1"], ["7*y", "1"], {"lam": "0"})
    rep = theorem_a_report(psvf, VI_PHI)
    assert rep["d"]["fires"]
    line = [p for p in rep["d"]["points"] if p["line_in_c0"]]
    assert line[0]["y0"] == pytest.approx(0.0, abs=1e-12)
    assert line[0]["sigma_kind"] == "fold_fold"


def test_theorem_a_cusp_critical_points_non_nh():
    psvf = PSVF.from_strings(["-y^2 + 1/10", "1"], ["1", "1"])
    rep = theorem_a_report(psvf, CUSP_PHI)
    assert rep["a"]["points"] and rep["a"]["all_non_nh"]
    assert rep["c"]["samples"] > 0 and rep["c"]["all_match"]
