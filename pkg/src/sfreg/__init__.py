"""Regularization of planar piecewise smooth vector fields and slow-fast singularity analysis."""
from .errors import SfregError
from .expr import Polynomial, eval_jet, isolate_roots, parse_expr, to_polynomial
from .psvf import PSVF, classify_sigma_point, sliding_equilibria, sliding_field
from .regularize import (
    NonlinearFamily, SlowFastSystem, blowup_linear, blowup_nonlinear,
    linear_regularize, nonlinear_regularize,
)
from .sfgeom import (
    classify_generic, critical_set, predict_linear, predict_nonlinear, theorem_a_report,
)
from .transition import TransitionConstraintSet, TransitionFunction, synthesize

__version__ = "0.1.0"

__all__ = [
    "SfregError", "Polynomial", "eval_jet", "isolate_roots", "parse_expr", "to_polynomial",
    "PSVF", "classify_sigma_point", "sliding_equilibria", "sliding_field",
    "NonlinearFamily", "SlowFastSystem", "blowup_linear", "blowup_nonlinear",
    "linear_regularize", "nonlinear_regularize",
    "classify_generic", "critical_set", "predict_linear", "predict_nonlinear", "theorem_a_report",
    "TransitionConstraintSet", "TransitionFunction", "synthesize", "__version__",
]
