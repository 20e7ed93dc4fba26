"""Numerical tolerances shared by every module."""

#: Magnitude below which a condition value is treated as zero.
ZETA = 1e-9

#: Width below which an isolating interval is considered refined.
ROOT_TOL = 1e-12

#: Bisection tolerance for critical-set and equilibrium refinement.
BISECT_TOL = 1e-10
